#pragma once

// Every tunable the pipeline exposes, with the defaults used throughout.
// A RunConfig serializes to JSON; its hash is stamped into every output.

#include <cstdint>
#include <string>
#include <string_view>

namespace skintone {

struct RoiConfig {
  double forehead_width_scale = 1.0;   // x inter-eye distance
  double forehead_height_scale = 0.5;  // x inter-eye distance
  double forehead_gap = 0.0;           // gap above the brows, x inter-eye distance
  double cheek_shrink = 0.15;
  double background_fraction = 0.1;    // corner square side, x min(image dims)
  int min_crop_side = 8;
  double pose_asymmetry_threshold = 0.15;
};

struct ItaConfig {
  int filter_size = 3;  // odd; 1 disables smoothing
  double bin_width = 1.0;
  int min_pixels = 64;
};

struct SkinSegConfig {
  double ellipse_scale = 0.85;
  double exclusion_dilation = 0.10;  // x face width
  double outlier_sigma = 2.0;
  int min_pixels = 100;
  bool background_normalization = true;
  double min_background_mean = 0.02;
  int min_background_pixels = 64;
  double max_normalized_value = 4.0;
};

struct RsrConfig {
  std::size_t max_fit_pixels = 200000;
  std::size_t min_fit_pixels = 1000;
};

enum class AssignmentRule {
  kUnitRowSum,       // channel sum of the unit-norm basis colors
  kEffectiveRowSum,  // channel sum x mean magnitude of the W column
};

struct NmfConfig {
  int max_iter = 500;
  double tol = 1e-6;
  double epsilon = 1e-12;
  bool resolve_extreme_rays = true;
  double extreme_quantile = 0.01;
  AssignmentRule assignment = AssignmentRule::kUnitRowSum;
};

struct KpcaConfig {
  int degree = 3;
  double gamma = 1.0 / 3.0;
  double coef0 = 1.0;
  std::size_t cap = 2000;
  std::size_t min_bases = 10;
};

struct SynthConfig {
  int image_size = 256;
  double specular_exponent = 4.0;
  double noise_sigma = 0.0;
  double min_diffuse_level = 0.15;
  double max_diffuse_level = 0.25;
  double specular_ratio = 5.0;      // highlight peak / diffuse level at 0 deg
  double highlight_width = 0.15;    // Gaussian sigma, x patch side
  double background_gray = 0.6;     // sRGB-encoded
};

struct RunConfig {
  RoiConfig roi;
  ItaConfig ita;
  SkinSegConfig skinseg;
  RsrConfig rsr;
  NmfConfig nmf;
  KpcaConfig kpca;
  SynthConfig synth;
  std::uint64_t seed = 0;

  /// Throws Error(kUsage) naming the first out-of-range field.
  void validate() const;
};

const char* to_string(AssignmentRule rule);

/// Canonical JSON (sorted keys, fixed float formatting).
std::string to_json(const RunConfig& config);

/// Overlays the keys present in `json` on the defaults; unknown keys are
/// rejected. Throws Error(kParse) or Error(kUsage).
RunConfig config_from_json(std::string_view json);

/// 16 hex digits of FNV-1a over the canonical JSON.
std::string config_hash(const RunConfig& config);

std::string fnv1a_hex(std::string_view bytes);

/// Shortest round-trip decimal form, used by every writer so that outputs are
/// byte-stable.
std::string format_double(double v);

}  // namespace skintone
