#pragma once

#include <filesystem>
#include <string>

#include <Eigen/Core>

#include "skintone/color.hpp"
#include "skintone/image.hpp"
#include "skintone/roi.hpp"

namespace skintone::test {

// Crop of a constant sRGB color.
inline RegionCrop constant_crop(Region region, int w, int h, const Rgb& srgb) {
  Image img(w, h, srgb);
  return crop_region(img, region, {0, 0, w, h});
}

inline RegionCrop crop_from_linear(Region region, const Eigen::MatrixX3d& linear) {
  RegionCrop c;
  c.region = region;
  c.linear = linear;
  c.srgb.resize(linear.rows(), 3);
  for (Eigen::Index i = 0; i < linear.rows(); ++i) {
    for (int k = 0; k < 3; ++k) c.srgb(i, k) = linear_to_srgb(linear(i, k));
  }
  c.rect = {0, 0, static_cast<int>(linear.rows()), 1};
  return c;
}

inline FaceSample sample_with(const RegionCrop& forehead, const RegionCrop& left,
                              const RegionCrop& right, std::string image_id = "img",
                              std::string subject_id = "subj") {
  FaceSample s;
  s.image_id = std::move(image_id);
  s.subject_id = std::move(subject_id);
  s.crops[0] = forehead;
  s.crops[0]->region = Region::kForehead;
  s.crops[1] = left;
  s.crops[1]->region = Region::kLeftCheek;
  s.crops[2] = right;
  s.crops[2]->region = Region::kRightCheek;
  return s;
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("skintone_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace skintone::test
