#pragma once

// Landmark ingestion and rectangular skin-patch extraction for the forehead,
// both cheeks and an image-corner background square.

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "skintone/config.hpp"
#include "skintone/image.hpp"

namespace skintone {

inline constexpr int kLandmarkCount = 68;

// Dlib 68-point indices used by the ROI and segmentation rules.
namespace landmark {
inline constexpr int kJawLeft = 2;
inline constexpr int kJawRight = 14;
inline constexpr int kBrowBegin = 17;
inline constexpr int kBrowEnd = 27;  // exclusive
inline constexpr int kNoseTip = 30;
inline constexpr int kEyeRightBegin = 36;  // subject's right, image left
inline constexpr int kEyeLeftBegin = 42;
inline constexpr int kEyeSize = 6;
inline constexpr int kMouthLeft = 48;
inline constexpr int kMouthRight = 54;
inline constexpr int kMouthOuterEnd = 60;  // exclusive
}  // namespace landmark

struct LandmarkSet {
  std::array<Point, kLandmarkCount> points{};

  LandmarkSet translated(double dx, double dy) const;
};

enum class Region { kForehead, kLeftCheek, kRightCheek, kBackground };

inline constexpr std::array<Region, 3> kSkinRegions = {
    Region::kForehead, Region::kLeftCheek, Region::kRightCheek};

const char* to_string(Region region);

struct RegionCrop {
  Region region = Region::kForehead;
  Rect rect;
  Eigen::MatrixX3d srgb;    // row-major over rect, encoded values
  Eigen::MatrixX3d linear;  // the PatchMatrix fed to NMF / projections
};

struct FaceSample {
  std::string image_id;
  std::string subject_id;
  std::array<std::optional<RegionCrop>, 4> crops;  // indexed by Region
  LandmarkSet landmarks;
  std::optional<std::string> label;
  std::vector<std::string> flags;  // e.g. background-unavailable, pose-asymmetric

  const RegionCrop& crop(Region r) const;
  bool has(Region r) const { return crops[static_cast<std::size_t>(r)].has_value(); }
};

struct CropRects {
  Rect forehead;
  Rect left_cheek;
  Rect right_cheek;
  std::optional<Rect> background;
  Rect face_box;
  bool pose_asymmetric = false;
};

Point eye_center(const LandmarkSet& lm, bool left);
double inter_eye_distance(const LandmarkSet& lm);

/// Pure geometry. Throws Error(kRegionExtraction) naming the region when a
/// skin rect is below the minimum side or leaves the image.
CropRects compute_crop_rects(int width, int height, const LandmarkSet& lm,
                             const RoiConfig& config = {});

RegionCrop crop_region(const Image& image, Region region, const Rect& rect);

/// Skin crops are mandatory; a missing background square is recorded as the
/// flag "background-unavailable".
FaceSample extract_crops(const Image& image, const LandmarkSet& landmarks,
                         const RoiConfig& config = {});

/// Parses the sidecar format {"image": "...", "points": [[x,y] x 68]}.
/// Bounds are checked when width/height are given (> 0).
LandmarkSet parse_landmarks(std::string_view json, int width = 0, int height = 0,
                            std::string* image_field = nullptr);

LandmarkSet load_landmarks(const std::filesystem::path& path, int width = 0,
                           int height = 0, std::string* image_field = nullptr);

std::string landmarks_to_json(const LandmarkSet& lm, const std::string& image);

}  // namespace skintone
