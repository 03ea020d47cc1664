#include <cmath>

#include <gtest/gtest.h>

#include "helpers.hpp"
#include "skintone/error.hpp"
#include "skintone/random.hpp"
#include "skintone/skinseg.hpp"
#include "skintone/synth.hpp"

using namespace skintone;

namespace {

// Independent rasterization of the mask: ellipse in the scaled landmark box,
// minus pixels within the dilation of the eye and outer-mouth polygons
// (those landmark rings are already convex and ordered).
std::size_t oracle_mask_count(int w, int h, const LandmarkSet& lm) {
  double x0 = 1e9, y0 = 1e9, x1 = -1e9, y1 = -1e9;
  for (const Point& p : lm.points) {
    x0 = std::min(x0, p.x), y0 = std::min(y0, p.y);
    x1 = std::max(x1, p.x), y1 = std::max(y1, p.y);
  }
  const double cx = (x0 + x1) / 2, cy = (y0 + y1) / 2;
  const double ax = 0.85 * (x1 - x0) / 2, ay = 0.85 * (y1 - y0) / 2;
  const double r = 0.10 * (x1 - x0);
  auto ring = [&](int b, int n) {
    std::vector<Point> v(lm.points.begin() + b, lm.points.begin() + b + n);
    return v;
  };
  const std::vector<std::vector<Point>> polys = {ring(36, 6), ring(42, 6), ring(48, 12)};
  auto near_poly = [&](double x, double y, const std::vector<Point>& poly) {
    bool in = false;
    for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
      const Point& a = poly[i];
      const Point& b = poly[j];
      if ((a.y > y) != (b.y > y) && x < (b.x - a.x) * (y - a.y) / (b.y - a.y) + a.x) in = !in;
    }
    if (in) return true;
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const Point& a = poly[i];
      const Point& b = poly[(i + 1) % poly.size()];
      for (int k = 0; k <= 200; ++k) {
        const double t = k / 200.0;
        if (std::hypot(x - (a.x + t * (b.x - a.x)), y - (a.y + t * (b.y - a.y))) <= r) return true;
      }
    }
    return false;
  };
  std::size_t count = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double u = (x - cx) / ax, v = (y - cy) / ay;
      if (u * u + v * v > 1.0) continue;
      bool excluded = false;
      for (const auto& p : polys) excluded = excluded || near_poly(x, y, p);
      if (!excluded) ++count;
    }
  }
  return count;
}

SkinPixelSet body_set(int n, double level, double spread, std::uint64_t seed) {
  Rng rng(seed);
  SkinPixelSet s;
  s.pixels.resize(n, 3);
  for (int i = 0; i < n; ++i) {
    const double v = level + rng.uniform(-spread, spread);
    s.pixels.row(i) << v, v, v;  // gray: luminance equals the channel value
  }
  return s;
}

}  // namespace

TEST(SkinSeg, MaskCountMatchesRasterOracle) {
  const Image img(256, 256, Rgb{0.6, 0.5, 0.4});
  const LandmarkSet lm = canonical_landmarks(256);
  const SkinPixelSet s = circular_mask(img, lm);
  const double expected = static_cast<double>(oracle_mask_count(256, 256, lm));
  EXPECT_NEAR(static_cast<double>(s.size()), expected, 0.02 * expected);
  EXPECT_EQ(s.source, PixelSource::kAdaptiveSegmentation);
}

TEST(SkinSeg, MaskClipsAtImageBorder) {
  const LandmarkSet lm = canonical_landmarks(256).translated(-70, 0);
  LandmarkSet clamped = lm;
  for (auto& p : clamped.points) p.x = std::max(p.x, 0.0);
  const Image img(256, 256, Rgb{0.6, 0.5, 0.4});
  const auto coords = face_mask_coordinates(256, 256, clamped);
  ASSERT_FALSE(coords.empty());
  for (auto [x, y] : coords) {
    EXPECT_GE(x, 0);
    EXPECT_LT(x, 256);
    EXPECT_GE(y, 0);
    EXPECT_LT(y, 256);
  }
  EXPECT_EQ(circular_mask(img, clamped).size(), static_cast<Eigen::Index>(coords.size()));
}

TEST(SkinSeg, DegenerateLandmarksFail) {
  // Every point on one spot: the exclusion hulls swallow the tiny ellipse.
  LandmarkSet lm;
  for (auto& p : lm.points) p = {100, 100};
  lm.points[0] = {101, 101};
  try {
    circular_mask(Image(256, 256, Rgb{0.5, 0.5, 0.5}), lm);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSegmentationFailed);
  }
}

TEST(SkinSeg, ConvexHullAndDistance) {
  const std::vector<Point> square = {{0, 0}, {2, 0}, {2, 2}, {0, 2}, {1, 1}, {1, 0}};
  const auto hull = convex_hull(square);
  EXPECT_EQ(hull.size(), 4u);
  EXPECT_DOUBLE_EQ(distance_to_convex_polygon({1, 1}, hull), 0.0);
  EXPECT_DOUBLE_EQ(distance_to_convex_polygon({5, 1}, hull), 3.0);
  EXPECT_DOUBLE_EQ(distance_to_convex_polygon({5, 6}, hull), 5.0);
}

TEST(SkinSeg, ConstantLuminanceUnchanged) {
  const SkinPixelSet s = body_set(200, 0.4, 0.0, 1);
  EXPECT_EQ(remove_luminance_outliers(s).pixels, s.pixels);
}

TEST(SkinSeg, BrightOutliersRemoved) {
  SkinPixelSet s = body_set(1000, 0.4, 0.01, 2);
  for (int i = 0; i < 10; ++i) s.pixels.row(i * 100) << 1.0, 1.0, 1.0;
  const SkinPixelSet out = remove_luminance_outliers(s);
  EXPECT_EQ(out.size(), 990);
  EXPECT_LT(out.pixels.maxCoeff(), 0.42);
  // Idempotent on its own output and never grows.
  const SkinPixelSet again = remove_luminance_outliers(out);
  EXPECT_EQ(again.pixels, out.pixels);
  EXPECT_LE(again.size(), out.size());
}

TEST(SkinSeg, OutlierRemovalPreconditions) {
  try {
    remove_luminance_outliers(body_set(50, 0.4, 0.01, 3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kPrecondition);
  }
  // Two clusters far apart with a few in the middle: everything is within
  // 2 sigma except nothing, but with min_pixels above the survivors it fails.
  SkinSegConfig cfg;
  cfg.min_pixels = 100;
  SkinPixelSet s = body_set(100, 0.4, 0.0, 4);
  s.pixels.row(0) << 1.0, 1.0, 1.0;
  try {
    remove_luminance_outliers(s, cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInsufficientPixels);
  }
}

TEST(SkinSeg, BackgroundDivision) {
  SkinPixelSet s;
  s.pixels.resize(1, 3);
  s.pixels << 0.4, 0.3, 0.2;
  const RegionCrop bg =
      test::crop_from_linear(Region::kBackground, Eigen::MatrixX3d::Constant(100, 3, 0.5));
  const SkinPixelSet out = background_normalize(s, bg);
  EXPECT_TRUE(out.normalized);
  EXPECT_NEAR(out.pixels(0, 0), 0.8, 1e-15);
  EXPECT_NEAR(out.pixels(0, 1), 0.6, 1e-15);
  EXPECT_NEAR(out.pixels(0, 2), 0.4, 1e-15);

  const RegionCrop white =
      test::crop_from_linear(Region::kBackground, Eigen::MatrixX3d::Constant(100, 3, 1.0));
  EXPECT_EQ(background_normalize(s, white).pixels, s.pixels);
}

TEST(SkinSeg, BackgroundErrors) {
  SkinPixelSet s = body_set(100, 0.4, 0.0, 5);
  Eigen::MatrixX3d dark = Eigen::MatrixX3d::Constant(100, 3, 0.5);
  dark.col(2).setConstant(0.01);
  try {
    background_normalize(s, test::crop_from_linear(Region::kBackground, dark));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBackgroundTooDark);
  }
  EXPECT_THROW(background_normalize(s, test::crop_from_linear(Region::kBackground,
                                                              Eigen::MatrixX3d::Constant(10, 3, 0.5))),
               Error);
}

TEST(SkinSeg, IlluminationScaleCancels) {
  // One synthetic face under two illumination levels 1.3x apart.
  const RenderedFace face = render_face(FaceScene{0.3, Eigen::Vector3d::Ones().normalized(), 0, 11});
  auto lit = [&](double k) {
    Image out(face.image.width(), face.image.height());
    for (int y = 0; y < out.height(); ++y) {
      for (int x = 0; x < out.width(); ++x) {
        out.at(x, y) = linear_to_srgb(Rgb::from(k * srgb_to_linear(face.image.at(x, y)).vec()));
      }
    }
    return out;
  };
  const Image dim = lit(0.7), bright = lit(0.7 * 1.3);
  const FaceSample a = extract_crops(dim, face.landmarks);
  const FaceSample b = extract_crops(bright, face.landmarks);
  const SkinPixelSet pa =
      background_normalize(circular_mask(dim, face.landmarks), a.crop(Region::kBackground));
  const SkinPixelSet pb =
      background_normalize(circular_mask(bright, face.landmarks), b.crop(Region::kBackground));
  ASSERT_EQ(pa.size(), pb.size());
  EXPECT_LT((pa.pixels - pb.pixels).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(SkinSeg, ScaleCancellationProperty) {
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    SkinPixelSet s = body_set(150, 0.3, 0.1, rng.next());
    Eigen::MatrixX3d bg = Eigen::MatrixX3d::Constant(64, 3, 0.4);
    for (Eigen::Index i = 0; i < bg.rows(); ++i) bg.row(i) *= rng.uniform(0.8, 1.2);
    const Eigen::RowVector3d k(rng.uniform(0.3, 1.5), rng.uniform(0.3, 1.5), rng.uniform(0.3, 1.5));
    SkinPixelSet t = s;
    t.pixels = (s.pixels.array().rowwise() * k.array()).matrix();
    const Eigen::MatrixX3d bgt = (bg.array().rowwise() * k.array()).matrix();
    const auto a = background_normalize(s, test::crop_from_linear(Region::kBackground, bg));
    const auto b = background_normalize(t, test::crop_from_linear(Region::kBackground, bgt));
    EXPECT_LT((a.pixels - b.pixels).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(SkinSeg, SegmentSkinFlags) {
  const RenderedFace face = render_face(FaceScene{0.3, Eigen::Vector3d::Ones().normalized(), 0, 11});
  const FaceSample s = extract_crops(face.image, face.landmarks);
  std::vector<std::string> flags;
  const SkinPixelSet p = segment_skin(face.image, s, SkinSegConfig{}, &flags);
  EXPECT_TRUE(p.normalized);
  EXPECT_EQ(flags, std::vector<std::string>{"bg-normalized"});
  EXPECT_GE(p.size(), 100);
  EXPECT_LE(p.pixels.maxCoeff(), 4.0);

  SkinSegConfig off;
  off.background_normalization = false;
  flags.clear();
  EXPECT_FALSE(segment_skin(face.image, s, off, &flags).normalized);
  EXPECT_TRUE(flags.empty());

  FaceSample no_bg = s;
  no_bg.crops[3].reset();
  flags.clear();
  segment_skin(face.image, no_bg, SkinSegConfig{}, &flags);
  EXPECT_EQ(flags, std::vector<std::string>{"bg-unavailable"});
}

TEST(SkinSeg, PatchUnionStacksRegions) {
  const RenderedFace face = render_face(FaceScene{});
  const FaceSample s = extract_crops(face.image, face.landmarks);
  const SkinPixelSet u = patch_union(s);
  EXPECT_EQ(u.source, PixelSource::kPatchUnion);
  EXPECT_EQ(u.size(), s.crop(Region::kForehead).linear.rows() +
                          s.crop(Region::kLeftCheek).linear.rows() +
                          s.crop(Region::kRightCheek).linear.rows());
}
