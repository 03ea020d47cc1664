#pragma once

// Relative Skin Reflectance: first principal axis of pooled skin pixels in RGB
// space, and the mean projection of an image's skin pixels onto it.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include <Eigen/Core>

#include "skintone/config.hpp"
#include "skintone/roi.hpp"
#include "skintone/skinseg.hpp"

namespace skintone {

enum class RsrVariant { kRsr, kRsrStar };

const char* to_string(RsrVariant v);

struct RsrFit {
  Eigen::Vector3d axis = Eigen::Vector3d::Zero();    // unit, axis . (1,1,1) > 0
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  Eigen::Vector3d eigenvalues = Eigen::Vector3d::Zero();  // descending
  std::size_t fit_pixel_count = 0;
  std::size_t total_pixel_count = 0;
  int sign_anchor = 1;  // -1 when the solver's eigenvector was flipped
  std::uint64_t seed = 0;
  RsrVariant variant = RsrVariant::kRsr;
};

/// Pools the pixel sets (seeded uniform subsample above max_fit_pixels) and
/// returns the leading covariance eigenvector. Throws Error(kInsufficientData)
/// below min_fit_pixels and Error(kDegenerateFit) for zero variance.
RsrFit fit_rsr(std::span<const SkinPixelSet> samples, std::uint64_t seed,
               RsrVariant variant = RsrVariant::kRsr, const RsrConfig& config = {});

/// Mean of (p - center) . axis. Throws Error(kPrecondition) on an empty set.
double project_rsr(const RsrFit& fit, const SkinPixelSet& pixels);
double project_rsr(const RsrFit& fit, const Eigen::MatrixX3d& pixels);

/// project_rsr over the union of the three skin patches.
double compute_rsr_star(const RsrFit& fit, const FaceSample& sample);

std::string to_json(const RsrFit& fit);
RsrFit rsr_fit_from_json(std::string_view json);

/// "rsr-" / "rsr-star-" followed by the hash of the serialized fit.
std::string fit_id(const RsrFit& fit);

}  // namespace skintone
