#pragma once

// Synthetic dichromatic data with known ground truth: pixel = m_b C_b + m_i C_i
// (+ noise) in linear RGB, with a constant (Lambertian) body magnitude and a
// Gaussian highlight whose energy falls off as cos^k of the incidence angle.

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "skintone/config.hpp"
#include "skintone/image.hpp"
#include "skintone/random.hpp"
#include "skintone/roi.hpp"

namespace skintone {

struct HighlightProfile {
  double center_x = 0.5;  // fraction of the patch side
  double center_y = 0.5;
  double width = 0.15;    // Gaussian sigma, fraction of the patch side
  double peak = 0.0;      // m_i at the center for a 0 degree incidence
};

struct DichromaticScene {
  Eigen::Vector3d body_color = Eigen::Vector3d::Ones().normalized();
  Eigen::Vector3d interface_color = Eigen::Vector3d::Ones().normalized();
  double incidence_angle = 0.0;  // degrees
  double diffuse_level = 0.2;
  HighlightProfile highlight;
  double specular_exponent = 4.0;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;
};

struct SyntheticPatch {
  Eigen::MatrixX3d pixels;  // linear RGB, clamped to [0,1]
  int side = 0;             // pixels lie row-major on a side x side grid
  Eigen::Vector3d body_color;       // unit
  Eigen::Vector3d interface_color;  // unit
  Eigen::VectorXd diffuse_magnitude;
  Eigen::VectorXd specular_magnitude;
  double clipped_fraction = 0.0;
};

/// cos^k of the incidence angle, 0 beyond +-90 degrees.
double specular_falloff(double angle_deg, double exponent);

/// Throws Error(kPrecondition) for n < 64 or invalid colors and
/// Error(kClipping) when more than 10% of pixels need clamping.
SyntheticPatch generate_patch(const DichromaticScene& scene, Eigen::Index n);

/// One patch per angle; patch i uses seed + i for its noise.
std::vector<SyntheticPatch> generate_illumination_sweep(const DichromaticScene& scene,
                                                        std::span<const double> angles,
                                                        Eigen::Index n);

/// Linear-light skin colors spanning the generator's tone range.
Eigen::Vector3d skin_body_color(double darkness);

/// Randomized scene in the regime where rank-2 separation is well posed:
/// white illuminant, body color between light and dark skin, highlight peak
/// a few times the diffuse level but below saturation.
DichromaticScene random_scene(Rng& rng, const SynthConfig& config = {});

/// Largest highlight peak keeping every channel at most 0.98.
double max_highlight_peak(const Eigen::Vector3d& body, double diffuse_level,
                          const Eigen::Vector3d& interface);

// Whole-face rendering for end-to-end runs.

struct FaceScene {
  double darkness = 0.5;  // 0 light .. 1 dark; selects C_b and m_b
  Eigen::Vector3d interface_color = Eigen::Vector3d::Ones().normalized();
  double incidence_angle = 0.0;
  std::uint64_t seed = 0;
};

struct RenderedFace {
  Image image;
  LandmarkSet landmarks;
  Eigen::Vector3d body_color;
  double diffuse_level = 0.0;
  double highlight_peak = 0.0;  // after the angular falloff
};

/// A frontal 68-point landmark layout scaled to a size x size image.
LandmarkSet canonical_landmarks(int size);

double diffuse_level_for(double darkness, const SynthConfig& config);

/// Skin ellipse with dark eyes and brows, a red mouth, a uniform gray
/// background and a highlight on each skin ROI.
RenderedFace render_face(const FaceScene& scene, const SynthConfig& config = {});

}  // namespace skintone
