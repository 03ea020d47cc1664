#include "skintone/color.hpp"

#include <cmath>
#include <string>

#include "skintone/error.hpp"

namespace skintone {

namespace {

// IEC 61966-2-1 primaries, D65.
constexpr double kRgbToXyz[3][3] = {
    {0.4124564, 0.3575761, 0.1804375},
    {0.2126729, 0.7151522, 0.0721750},
    {0.0193339, 0.1191920, 0.9503041},
};

// Reference white is the image of linear (1,1,1) so that every gray maps to
// a = b = 0 exactly.
constexpr double kWhiteX = kRgbToXyz[0][0] + kRgbToXyz[0][1] + kRgbToXyz[0][2];
constexpr double kWhiteY = kRgbToXyz[1][0] + kRgbToXyz[1][1] + kRgbToXyz[1][2];
constexpr double kWhiteZ = kRgbToXyz[2][0] + kRgbToXyz[2][1] + kRgbToXyz[2][2];

constexpr double kDelta = 6.0 / 29.0;

double lab_f(double t) {
  if (t > kDelta * kDelta * kDelta) return std::cbrt(t);
  return t / (3.0 * kDelta * kDelta) + 4.0 / 29.0;
}

}  // namespace

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDomain: return "domain";
    case ErrorCode::kParse: return "parse";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kRegionExtraction: return "region-extraction";
    case ErrorCode::kBackgroundUnavailable: return "background-unavailable";
    case ErrorCode::kBackgroundTooDark: return "background-too-dark";
    case ErrorCode::kSegmentationFailed: return "segmentation-failed";
    case ErrorCode::kInsufficientPixels: return "insufficient-pixels";
    case ErrorCode::kInsufficientData: return "insufficient-data";
    case ErrorCode::kPrecondition: return "precondition";
    case ErrorCode::kDegenerateFit: return "degenerate-fit";
    case ErrorCode::kInit: return "init";
    case ErrorCode::kNumericalFailure: return "numerical-failure";
    case ErrorCode::kClipping: return "clipping";
    case ErrorCode::kMetricUnavailable: return "metric-unavailable";
    case ErrorCode::kUsage: return "usage";
  }
  return "unknown";
}

void check_unit_range(const Rgb& p) {
  for (double c : {p.r, p.g, p.b}) {
    if (!std::isfinite(c) || c < 0.0 || c > 1.0) {
      throw Error(ErrorCode::kDomain,
                  "channel value " + std::to_string(c) + " outside [0,1]");
    }
  }
}

double srgb_to_linear(double c) {
  if (c <= 0.04045) return c / 12.92;
  return std::pow((c + 0.055) / 1.055, 2.4);
}

double linear_to_srgb(double c) {
  if (c <= 0.0031308) return 12.92 * c;
  return 1.055 * std::pow(c, 1.0 / 2.4) - 0.055;
}

Rgb srgb_to_linear(const Rgb& p) {
  check_unit_range(p);
  return {srgb_to_linear(p.r), srgb_to_linear(p.g), srgb_to_linear(p.b)};
}

Rgb linear_to_srgb(const Rgb& p) {
  check_unit_range(p);
  return {linear_to_srgb(p.r), linear_to_srgb(p.g), linear_to_srgb(p.b)};
}

Xyz linear_to_xyz(const Rgb& p) {
  const auto& m = kRgbToXyz;
  return {m[0][0] * p.r + m[0][1] * p.g + m[0][2] * p.b,
          m[1][0] * p.r + m[1][1] * p.g + m[1][2] * p.b,
          m[2][0] * p.r + m[2][1] * p.g + m[2][2] * p.b};
}

Lab xyz_to_lab(const Xyz& xyz) {
  const double fx = lab_f(xyz.x / kWhiteX);
  const double fy = lab_f(xyz.y / kWhiteY);
  const double fz = lab_f(xyz.z / kWhiteZ);
  return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

Lab rgb_to_lab(const Rgb& srgb) {
  return xyz_to_lab(linear_to_xyz(srgb_to_linear(srgb)));
}

}  // namespace skintone
