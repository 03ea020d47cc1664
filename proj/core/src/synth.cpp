#include "skintone/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "skintone/color.hpp"
#include "skintone/error.hpp"

namespace skintone {

namespace {

constexpr double kClipLimit = 0.10;

void check_color(const Eigen::Vector3d& c, const char* what) {
  if (!c.allFinite() || c.minCoeff() < 0.0 || !(c.norm() > 0.0)) {
    throw Error(ErrorCode::kPrecondition, std::string(what) + " must be a non-negative, non-zero color");
  }
}

double gaussian(double dx, double dy, double sigma) {
  return std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
}

}  // namespace

double specular_falloff(double angle_deg, double exponent) {
  const double c = std::cos(angle_deg * std::numbers::pi / 180.0);
  return c <= 0.0 ? 0.0 : std::pow(c, exponent);
}

double max_highlight_peak(const Eigen::Vector3d& body, double diffuse_level,
                          const Eigen::Vector3d& interface) {
  return std::max(0.0, (0.98 - diffuse_level * body.maxCoeff()) / interface.maxCoeff());
}

SyntheticPatch generate_patch(const DichromaticScene& scene, Eigen::Index n) {
  if (n < 64) throw Error(ErrorCode::kPrecondition, "synthetic patch needs n >= 64");
  check_color(scene.body_color, "body color");
  check_color(scene.interface_color, "interface color");
  if (!(scene.diffuse_level >= 0.0) || !(scene.highlight.peak >= 0.0) ||
      !(scene.noise_sigma >= 0.0) || !(scene.highlight.width > 0.0)) {
    throw Error(ErrorCode::kPrecondition, "scene magnitudes must be non-negative");
  }

  SyntheticPatch out;
  out.side = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
  out.body_color = scene.body_color.normalized();
  out.interface_color = scene.interface_color.normalized();
  out.diffuse_magnitude = Eigen::VectorXd::Constant(n, scene.diffuse_level);
  out.specular_magnitude.resize(n);
  out.pixels.resize(n, 3);

  const double side = out.side;
  const double peak =
      scene.highlight.peak * specular_falloff(scene.incidence_angle, scene.specular_exponent);
  const double cx = scene.highlight.center_x * side, cy = scene.highlight.center_y * side;
  const double sigma = scene.highlight.width * side;
  Rng rng(scene.seed);
  Eigen::Index clipped = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = static_cast<double>(i % out.side) + 0.5;
    const double y = static_cast<double>(i / out.side) + 0.5;
    const double mi = peak * gaussian(x - cx, y - cy, sigma);
    out.specular_magnitude(i) = mi;
    Eigen::Vector3d p = scene.diffuse_level * out.body_color + mi * out.interface_color;
    if (scene.noise_sigma > 0.0) {
      for (int c = 0; c < 3; ++c) p(c) += scene.noise_sigma * rng.normal();
    }
    const Eigen::Vector3d q = p.cwiseMax(0.0).cwiseMin(1.0);
    if (q != p) ++clipped;
    out.pixels.row(i) = q.transpose();
  }
  out.clipped_fraction = static_cast<double>(clipped) / static_cast<double>(n);
  if (out.clipped_fraction > kClipLimit) {
    throw Error(ErrorCode::kClipping, "synthetic patch clips " +
                                          std::to_string(clipped) + " of " + std::to_string(n) +
                                          " pixels");
  }
  return out;
}

std::vector<SyntheticPatch> generate_illumination_sweep(const DichromaticScene& scene,
                                                        std::span<const double> angles,
                                                        Eigen::Index n) {
  if (angles.empty()) throw Error(ErrorCode::kPrecondition, "illumination sweep needs angles");
  std::vector<SyntheticPatch> out;
  out.reserve(angles.size());
  for (std::size_t i = 0; i < angles.size(); ++i) {
    DichromaticScene s = scene;
    s.incidence_angle = angles[i];
    s.seed = scene.seed + i;
    out.push_back(generate_patch(s, n));
  }
  return out;
}

Eigen::Vector3d skin_body_color(double darkness) {
  const Eigen::Vector3d light = Eigen::Vector3d(0.73, 0.41, 0.26).normalized();
  const Eigen::Vector3d dark = Eigen::Vector3d(0.17, 0.07, 0.033).normalized();
  const double t = std::clamp(darkness, 0.0, 1.0);
  return ((1.0 - t) * light + t * dark).normalized();
}

DichromaticScene random_scene(Rng& rng, const SynthConfig& config) {
  DichromaticScene s;
  s.body_color = skin_body_color(rng.uniform());
  s.interface_color = Eigen::Vector3d::Ones().normalized();
  s.diffuse_level = rng.uniform(config.min_diffuse_level, config.max_diffuse_level);
  const double ratio = rng.uniform(0.8, 1.2) * config.specular_ratio;
  s.highlight.peak = std::min(ratio * s.diffuse_level,
                              max_highlight_peak(s.body_color, s.diffuse_level, s.interface_color));
  s.highlight.width = rng.uniform(2.0 / 3.0, 1.2) * config.highlight_width;
  s.highlight.center_x = rng.uniform(0.25, 0.75);
  s.highlight.center_y = rng.uniform(0.25, 0.75);
  s.specular_exponent = config.specular_exponent;
  s.noise_sigma = config.noise_sigma;
  s.seed = rng.next();
  return s;
}

LandmarkSet canonical_landmarks(int size) {
  LandmarkSet lm;
  auto& p = lm.points;
  const double s = size;
  auto at = [&](int i, double u, double v) { p[i] = {u * s, v * s}; };
  const double pi = std::numbers::pi;

  // Jaw: lower half of an ellipse, image left to image right.
  for (int i = 0; i <= 16; ++i) {
    const double th = pi - pi * i / 16.0;
    at(i, 0.5 + 0.30 * std::cos(th), 0.45 + 0.40 * std::sin(th));
  }
  // Brows, slightly arched.
  for (int i = 0; i < 5; ++i) {
    const double arch = 0.02 * std::sin(pi * i / 4.0);
    at(17 + i, 0.30 + 0.0375 * i, 0.36 - arch);
    at(22 + i, 0.55 + 0.0375 * i, 0.36 - arch);
  }
  for (int i = 0; i < 4; ++i) at(27 + i, 0.5, 0.40 + 0.05 * i);
  for (int i = 0; i < 5; ++i) at(31 + i, 0.46 + 0.02 * i, 0.58);
  // Eyes: six points on small ellipses, starting at the outer corner.
  for (int i = 0; i < 6; ++i) {
    const double th = pi - 2.0 * pi * i / 6.0;
    at(36 + i, 0.38 + 0.045 * std::cos(th), 0.42 - 0.018 * std::sin(th));
    at(42 + i, 0.62 - 0.045 * std::cos(th), 0.42 - 0.018 * std::sin(th));
  }
  // Mouth: 12 outer points from the left corner, then 8 inner points.
  for (int i = 0; i < 12; ++i) {
    const double th = pi - 2.0 * pi * i / 12.0;
    at(48 + i, 0.5 + 0.09 * std::cos(th), 0.70 - 0.035 * std::sin(th));
  }
  for (int i = 0; i < 8; ++i) {
    const double th = pi - 2.0 * pi * i / 8.0;
    at(60 + i, 0.5 + 0.06 * std::cos(th), 0.70 - 0.015 * std::sin(th));
  }
  return lm;
}

double diffuse_level_for(double darkness, const SynthConfig& config) {
  const double t = std::clamp(darkness, 0.0, 1.0);
  return config.max_diffuse_level - (config.max_diffuse_level - config.min_diffuse_level) * t;
}

RenderedFace render_face(const FaceScene& scene, const SynthConfig& config) {
  const int size = config.image_size;
  if (size < 64) throw Error(ErrorCode::kPrecondition, "face image size must be >= 64");
  check_color(scene.interface_color, "interface color");

  RenderedFace out;
  out.landmarks = canonical_landmarks(size);
  out.body_color = skin_body_color(scene.darkness);
  out.diffuse_level = diffuse_level_for(scene.darkness, config);
  const Eigen::Vector3d ci = scene.interface_color.normalized();
  const double peak0 = std::min(config.specular_ratio * out.diffuse_level,
                                max_highlight_peak(out.body_color, out.diffuse_level, ci));
  out.highlight_peak = peak0 * specular_falloff(scene.incidence_angle, config.specular_exponent);

  struct Spot {
    double x, y, sigma;
  };
  std::vector<Spot> spots;
  const CropRects rects = compute_crop_rects(size, size, out.landmarks);
  for (const Rect& r : {rects.forehead, rects.left_cheek, rects.right_cheek}) {
    spots.push_back({r.x0 + 0.5 * r.width, r.y0 + 0.5 * r.height,
                     config.highlight_width * std::min(r.width, r.height)});
  }

  auto inside_poly = [&](double x, double y, int begin, int end) {
    // Points are ordered around the contour; even-odd rule.
    bool in = false;
    for (int i = begin, j = end - 1; i < end; j = i++) {
      const Point& a = out.landmarks.points[i];
      const Point& b = out.landmarks.points[j];
      if ((a.y > y) != (b.y > y) && x < (b.x - a.x) * (y - a.y) / (b.y - a.y) + a.x) in = !in;
    }
    return in;
  };

  const Eigen::Vector3d eye_color(0.02, 0.015, 0.012);
  const Eigen::Vector3d brow_color(0.03, 0.02, 0.015);
  const Eigen::Vector3d lip_color = 0.6 * out.diffuse_level * Eigen::Vector3d(0.9, 0.25, 0.25);
  const double bg = srgb_to_linear(config.background_gray);

  Rng rng(scene.seed);
  out.image = Image(size, size);
  const double s = size;
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      const double px = x + 0.5, py = y + 0.5;
      const double u = (px / s - 0.5) / 0.34, v = (py / s - 0.45) / 0.44;
      Eigen::Vector3d c = Eigen::Vector3d::Constant(bg);
      if (u * u + v * v <= 1.0) {
        double mi = 0.0;
        for (const Spot& sp : spots) mi += out.highlight_peak * gaussian(px - sp.x, py - sp.y, sp.sigma);
        c = out.diffuse_level * out.body_color + mi * ci;
        const bool brow = std::abs(py / s - 0.355) < 0.012 &&
                          ((px / s > 0.30 && px / s < 0.45) || (px / s > 0.55 && px / s < 0.70));
        if (brow) c = brow_color;
        if (inside_poly(px, py, landmark::kEyeRightBegin,
                        landmark::kEyeRightBegin + landmark::kEyeSize) ||
            inside_poly(px, py, landmark::kEyeLeftBegin,
                        landmark::kEyeLeftBegin + landmark::kEyeSize)) {
          c = eye_color;
        }
        if (inside_poly(px, py, landmark::kMouthLeft, landmark::kMouthOuterEnd)) c = lip_color;
      }
      if (config.noise_sigma > 0.0) {
        for (int k = 0; k < 3; ++k) c(k) += config.noise_sigma * rng.normal();
      }
      c = c.cwiseMax(0.0).cwiseMin(1.0);
      out.image.at(x, y) = linear_to_srgb(Rgb::from(c));
    }
  }
  return out;
}

}  // namespace skintone
