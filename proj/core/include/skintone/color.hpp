#pragma once

// Colorspace conversions shared by every metric. All functions are pure.
//
// Pixels arrive sRGB-encoded in [0,1] (8-bit values divided by 255). The
// dichromatic model is linear, so NMF and PCA work on linear RGB; Lab goes
// through the standard sRGB -> linear -> XYZ (D65, 2 deg) -> Lab chain.

#include <Eigen/Core>

namespace skintone {

struct Rgb {
  double r = 0.0;
  double g = 0.0;
  double b = 0.0;

  Eigen::Vector3d vec() const { return {r, g, b}; }
  static Rgb from(const Eigen::Vector3d& v) { return {v.x(), v.y(), v.z()}; }
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

struct Lab {
  double L = 0.0;
  double a = 0.0;
  double b = 0.0;
};

struct Xyz {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

/// Throws Error(kDomain) if any channel is non-finite or outside [0,1].
void check_unit_range(const Rgb& p);

double srgb_to_linear(double c);
double linear_to_srgb(double c);

/// Piecewise sRGB decoding per channel.
Rgb srgb_to_linear(const Rgb& p);
Rgb linear_to_srgb(const Rgb& p);

Xyz linear_to_xyz(const Rgb& linear);
Lab xyz_to_lab(const Xyz& xyz);

/// sRGB-encoded input; white (1,1,1) maps to L=100, a=b=0.
Lab rgb_to_lab(const Rgb& srgb);

/// Rec. 709 luminance of a linear-RGB pixel.
constexpr double luminance(const Rgb& linear) {
  return 0.2126 * linear.r + 0.7152 * linear.g + 0.0722 * linear.b;
}

inline double luminance(const Eigen::Vector3d& linear) {
  return 0.2126 * linear.x() + 0.7152 * linear.y() + 0.0722 * linear.z();
}

}  // namespace skintone
