#include "skintone/skinseg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "skintone/color.hpp"
#include "skintone/error.hpp"

namespace skintone {

namespace {

double cross(const Point& o, const Point& a, const Point& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

double segment_distance(const Point& p, const Point& a, const Point& b) {
  const double vx = b.x - a.x, vy = b.y - a.y;
  const double len2 = vx * vx + vy * vy;
  double t = 0.0;
  if (len2 > 0) t = std::clamp(((p.x - a.x) * vx + (p.y - a.y) * vy) / len2, 0.0, 1.0);
  return std::hypot(p.x - (a.x + t * vx), p.y - (a.y + t * vy));
}

std::vector<Point> hull_of(const LandmarkSet& lm, int begin, int end) {
  return convex_hull({lm.points.begin() + begin, lm.points.begin() + end});
}

}  // namespace

std::vector<Point> convex_hull(std::vector<Point> pts) {
  std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const Point& a, const Point& b) { return a.x == b.x && a.y == b.y; }),
            pts.end());
  if (pts.size() < 3) return pts;
  std::vector<Point> hull(2 * pts.size());
  std::size_t k = 0;
  for (const Point& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

double distance_to_convex_polygon(const Point& p, const std::vector<Point>& hull) {
  if (hull.empty()) return std::numeric_limits<double>::infinity();
  if (hull.size() == 1) return std::hypot(p.x - hull[0].x, p.y - hull[0].y);
  bool inside = hull.size() >= 3;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const Point& a = hull[i];
    const Point& b = hull[(i + 1) % hull.size()];
    if (cross(a, b, p) < 0) inside = false;
    best = std::min(best, segment_distance(p, a, b));
  }
  return inside ? 0.0 : best;
}

std::vector<std::pair<int, int>> face_mask_coordinates(int width, int height,
                                                       const LandmarkSet& lm,
                                                       const SkinSegConfig& config) {
  double x0 = std::numeric_limits<double>::max(), y0 = x0;
  double x1 = std::numeric_limits<double>::lowest(), y1 = x1;
  for (const Point& p : lm.points) {
    x0 = std::min(x0, p.x);
    y0 = std::min(y0, p.y);
    x1 = std::max(x1, p.x);
    y1 = std::max(y1, p.y);
  }
  const double cx = 0.5 * (x0 + x1), cy = 0.5 * (y0 + y1);
  const double ax = 0.5 * (x1 - x0) * config.ellipse_scale;
  const double ay = 0.5 * (y1 - y0) * config.ellipse_scale;
  const double dilation = config.exclusion_dilation * (x1 - x0);

  const std::vector<std::vector<Point>> exclusions = {
      hull_of(lm, landmark::kEyeRightBegin, landmark::kEyeRightBegin + landmark::kEyeSize),
      hull_of(lm, landmark::kEyeLeftBegin, landmark::kEyeLeftBegin + landmark::kEyeSize),
      hull_of(lm, landmark::kMouthLeft, landmark::kMouthOuterEnd)};

  std::vector<std::pair<int, int>> kept;
  if (ax <= 0 || ay <= 0) return kept;
  const int ys = std::max(0, static_cast<int>(std::floor(cy - ay)));
  const int ye = std::min(height - 1, static_cast<int>(std::ceil(cy + ay)));
  const int xs = std::max(0, static_cast<int>(std::floor(cx - ax)));
  const int xe = std::min(width - 1, static_cast<int>(std::ceil(cx + ax)));
  for (int y = ys; y <= ye; ++y) {
    for (int x = xs; x <= xe; ++x) {
      const double u = (x - cx) / ax, v = (y - cy) / ay;
      if (u * u + v * v > 1.0) continue;
      const Point p{static_cast<double>(x), static_cast<double>(y)};
      const bool excluded = std::any_of(exclusions.begin(), exclusions.end(), [&](const auto& h) {
        return distance_to_convex_polygon(p, h) <= dilation;
      });
      if (!excluded) kept.emplace_back(x, y);
    }
  }
  return kept;
}

SkinPixelSet circular_mask(const Image& image, const LandmarkSet& landmarks,
                           const SkinSegConfig& config) {
  const auto coords = face_mask_coordinates(image.width(), image.height(), landmarks, config);
  if (coords.empty()) {
    throw Error(ErrorCode::kSegmentationFailed, "face mask is empty");
  }
  SkinPixelSet set;
  set.source = PixelSource::kAdaptiveSegmentation;
  set.pixels.resize(static_cast<Eigen::Index>(coords.size()), 3);
  for (std::size_t i = 0; i < coords.size(); ++i) {
    const Rgb lin = srgb_to_linear(image.at(coords[i].first, coords[i].second));
    set.pixels.row(static_cast<Eigen::Index>(i)) << lin.r, lin.g, lin.b;
  }
  return set;
}

SkinPixelSet remove_luminance_outliers(const SkinPixelSet& set, const SkinSegConfig& config) {
  const Eigen::Index n = set.size();
  if (n < config.min_pixels) {
    throw Error(ErrorCode::kPrecondition,
                "outlier removal needs " + std::to_string(config.min_pixels) +
                    " pixels, got " + std::to_string(n));
  }
  const Eigen::VectorXd lum = set.pixels * Eigen::Vector3d(0.2126, 0.7152, 0.0722);
  const double mean = lum.mean();
  const double stddev = std::sqrt((lum.array() - mean).square().mean());
  const double limit = config.outlier_sigma * stddev;

  std::vector<Eigen::Index> keep;
  keep.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(lum(i) - mean) <= limit) keep.push_back(i);
  }
  if (static_cast<long>(keep.size()) < config.min_pixels) {
    throw Error(ErrorCode::kInsufficientPixels,
                "only " + std::to_string(keep.size()) + " skin pixels after outlier removal");
  }
  SkinPixelSet out;
  out.source = set.source;
  out.normalized = set.normalized;
  out.pixels.resize(static_cast<Eigen::Index>(keep.size()), 3);
  for (std::size_t i = 0; i < keep.size(); ++i) {
    out.pixels.row(static_cast<Eigen::Index>(i)) = set.pixels.row(keep[i]);
  }
  return out;
}

SkinPixelSet background_normalize(const SkinPixelSet& set, const RegionCrop& background,
                                  const SkinSegConfig& config) {
  if (background.linear.rows() < config.min_background_pixels) {
    throw Error(ErrorCode::kPrecondition, "background crop has too few pixels");
  }
  const Eigen::RowVector3d mean = background.linear.colwise().mean();
  if (mean.minCoeff() < config.min_background_mean) {
    throw Error(ErrorCode::kBackgroundTooDark, "background channel mean below threshold");
  }
  SkinPixelSet out;
  out.source = set.source;
  out.normalized = true;
  out.pixels = (set.pixels.array().rowwise() / mean.array())
                   .cwiseMax(0.0)
                   .cwiseMin(config.max_normalized_value)
                   .matrix();
  return out;
}

SkinPixelSet segment_skin(const Image& image, const FaceSample& sample,
                          const SkinSegConfig& config, std::vector<std::string>* flags) {
  SkinPixelSet set = remove_luminance_outliers(circular_mask(image, sample.landmarks, config),
                                               config);
  if (!config.background_normalization) return set;
  auto flag = [&](const char* f) {
    if (flags != nullptr) flags->emplace_back(f);
  };
  if (!sample.has(Region::kBackground)) {
    flag("bg-unavailable");
    return set;
  }
  try {
    SkinPixelSet normalized = background_normalize(set, sample.crop(Region::kBackground), config);
    flag("bg-normalized");
    return normalized;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kBackgroundTooDark && e.code() != ErrorCode::kPrecondition) throw;
    flag(e.code() == ErrorCode::kBackgroundTooDark ? "bg-too-dark" : "bg-unavailable");
    return set;
  }
}

SkinPixelSet patch_union(const FaceSample& sample) {
  Eigen::Index total = 0;
  for (Region r : kSkinRegions) total += sample.crop(r).linear.rows();
  SkinPixelSet set;
  set.source = PixelSource::kPatchUnion;
  set.pixels.resize(total, 3);
  Eigen::Index at = 0;
  for (Region r : kSkinRegions) {
    const auto& lin = sample.crop(r).linear;
    set.pixels.middleRows(at, lin.rows()) = lin;
    at += lin.rows();
  }
  return set;
}

}  // namespace skintone
