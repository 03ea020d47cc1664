#pragma once

// Adaptive skin segmentation used by RSR: an elliptical face mask with eye and
// mouth exclusions, a luminance outlier pass, and optional divisive
// normalization by the background patch.

#include <vector>

#include <Eigen/Core>

#include "skintone/config.hpp"
#include "skintone/image.hpp"
#include "skintone/roi.hpp"

namespace skintone {

enum class PixelSource { kAdaptiveSegmentation, kPatchUnion };

struct SkinPixelSet {
  Eigen::MatrixX3d pixels;  // linear RGB; up to max_normalized_value after division
  PixelSource source = PixelSource::kAdaptiveSegmentation;
  bool normalized = false;

  Eigen::Index size() const { return pixels.rows(); }
};

/// Convex hull (monotone chain), counter-clockwise in image coordinates.
std::vector<Point> convex_hull(std::vector<Point> points);

/// Euclidean distance from p to a convex polygon; 0 inside.
double distance_to_convex_polygon(const Point& p, const std::vector<Point>& hull);

/// Pixel coordinates kept by the face mask (row-major order).
std::vector<std::pair<int, int>> face_mask_coordinates(int width, int height,
                                                       const LandmarkSet& landmarks,
                                                       const SkinSegConfig& config = {});

/// Linear-RGB pixels under the face mask. Throws Error(kSegmentationFailed)
/// when nothing survives.
SkinPixelSet circular_mask(const Image& image, const LandmarkSet& landmarks,
                           const SkinSegConfig& config = {});

/// Drops pixels whose luminance is outside mean +- sigma*std (one pass).
/// Throws Error(kPrecondition) below min_pixels on input and
/// Error(kInsufficientPixels) below min_pixels on output.
SkinPixelSet remove_luminance_outliers(const SkinPixelSet& set,
                                       const SkinSegConfig& config = {});

/// Channel-wise division by the background mean, clamped to
/// [0, max_normalized_value]. Throws Error(kBackgroundTooDark) or
/// Error(kPrecondition) for a background below min_background_pixels.
SkinPixelSet background_normalize(const SkinPixelSet& set, const RegionCrop& background,
                                  const SkinSegConfig& config = {});

/// Full segmentation chain for one image. Background normalization is applied
/// only when enabled and possible; `flags` receives what happened
/// ("bg-normalized", "bg-unavailable", "bg-too-dark").
SkinPixelSet segment_skin(const Image& image, const FaceSample& sample,
                          const SkinSegConfig& config, std::vector<std::string>* flags);

/// Union of the three skin patches (no normalization), the RSR* input.
SkinPixelSet patch_union(const FaceSample& sample);

}  // namespace skintone
