#include "skintone/roi.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "skintone/error.hpp"

namespace skintone {

namespace {

int round_px(double v) { return static_cast<int>(std::floor(v + 0.5)); }

Rect bounding_box(const LandmarkSet& lm) {
  double x0 = std::numeric_limits<double>::max(), y0 = x0;
  double x1 = std::numeric_limits<double>::lowest(), y1 = x1;
  for (const Point& p : lm.points) {
    x0 = std::min(x0, p.x);
    y0 = std::min(y0, p.y);
    x1 = std::max(x1, p.x);
    y1 = std::max(y1, p.y);
  }
  const int ix0 = static_cast<int>(std::floor(x0));
  const int iy0 = static_cast<int>(std::floor(y0));
  return {ix0, iy0, static_cast<int>(std::floor(x1)) - ix0 + 1,
          static_cast<int>(std::floor(y1)) - iy0 + 1};
}

Rect united(const Rect& a, const Rect& b) {
  const int x0 = std::min(a.x0, b.x0), y0 = std::min(a.y0, b.y0);
  return {x0, y0, std::max(a.x1(), b.x1()) - x0, std::max(a.y1(), b.y1()) - y0};
}

void check_rect(const Rect& r, Region region, int width, int height, int min_side) {
  if (r.width < min_side || r.height < min_side) {
    throw Error(ErrorCode::kRegionExtraction,
                std::string(to_string(region)) + " crop degenerate (" +
                    std::to_string(r.width) + "x" + std::to_string(r.height) + ")");
  }
  if (r.x0 < 0 || r.y0 < 0 || r.x1() > width || r.y1() > height) {
    throw Error(ErrorCode::kRegionExtraction,
                std::string(to_string(region)) + " crop outside the image");
  }
}

Rect cheek_rect(const Point& jaw, const Point& mouth, double shrink) {
  const double cx = 0.5 * (jaw.x + mouth.x);
  const double cy = 0.5 * (jaw.y + mouth.y);
  const double side = std::abs(mouth.x - jaw.x) * (1.0 - shrink);
  const int s = round_px(side);
  return {round_px(cx - 0.5 * side), round_px(cy - 0.5 * side), s, s};
}

}  // namespace

LandmarkSet LandmarkSet::translated(double dx, double dy) const {
  LandmarkSet out = *this;
  for (Point& p : out.points) {
    p.x += dx;
    p.y += dy;
  }
  return out;
}

const char* to_string(Region region) {
  switch (region) {
    case Region::kForehead: return "forehead";
    case Region::kLeftCheek: return "left_cheek";
    case Region::kRightCheek: return "right_cheek";
    case Region::kBackground: return "background";
  }
  return "unknown";
}

const RegionCrop& FaceSample::crop(Region r) const {
  const auto& c = crops[static_cast<std::size_t>(r)];
  if (!c) {
    throw Error(ErrorCode::kRegionExtraction,
                std::string(to_string(r)) + " crop not present");
  }
  return *c;
}

Point eye_center(const LandmarkSet& lm, bool left) {
  const int begin = left ? landmark::kEyeLeftBegin : landmark::kEyeRightBegin;
  Point c;
  for (int i = begin; i < begin + landmark::kEyeSize; ++i) {
    c.x += lm.points[i].x;
    c.y += lm.points[i].y;
  }
  c.x /= landmark::kEyeSize;
  c.y /= landmark::kEyeSize;
  return c;
}

double inter_eye_distance(const LandmarkSet& lm) {
  const Point a = eye_center(lm, false), b = eye_center(lm, true);
  return std::hypot(b.x - a.x, b.y - a.y);
}

CropRects compute_crop_rects(int width, int height, const LandmarkSet& lm,
                             const RoiConfig& config) {
  CropRects out;
  const Point eye_r = eye_center(lm, false);
  const Point eye_l = eye_center(lm, true);
  const double d = std::hypot(eye_l.x - eye_r.x, eye_l.y - eye_r.y);

  // Forehead: centered between the eyes, bottom edge at or above the highest
  // brow point.
  double brow_top = std::numeric_limits<double>::max();
  for (int i = landmark::kBrowBegin; i < landmark::kBrowEnd; ++i) {
    brow_top = std::min(brow_top, lm.points[i].y);
  }
  const double fw = config.forehead_width_scale * d;
  const double fh = config.forehead_height_scale * d;
  const double cx = 0.5 * (eye_r.x + eye_l.x);
  const double bottom = brow_top - config.forehead_gap * d;
  out.forehead = {round_px(cx - 0.5 * fw), static_cast<int>(std::floor(bottom - fh)),
                  round_px(fw), round_px(fh)};
  check_rect(out.forehead, Region::kForehead, width, height, config.min_crop_side);

  out.left_cheek = cheek_rect(lm.points[landmark::kJawLeft],
                              lm.points[landmark::kMouthLeft], config.cheek_shrink);
  check_rect(out.left_cheek, Region::kLeftCheek, width, height, config.min_crop_side);
  out.right_cheek = cheek_rect(lm.points[landmark::kJawRight],
                               lm.points[landmark::kMouthRight], config.cheek_shrink);
  check_rect(out.right_cheek, Region::kRightCheek, width, height, config.min_crop_side);

  out.face_box = united(bounding_box(lm), out.forehead);

  const int side = static_cast<int>(
      std::floor(config.background_fraction * std::min(width, height)));
  if (side >= config.min_crop_side) {
    const std::array<Rect, 4> corners = {Rect{0, 0, side, side},
                                         Rect{width - side, 0, side, side},
                                         Rect{0, height - side, side, side},
                                         Rect{width - side, height - side, side, side}};
    for (const Rect& r : corners) {
      if (!r.overlaps(out.face_box)) {
        out.background = r;
        break;
      }
    }
  }

  const Point nose = lm.points[landmark::kNoseTip];
  out.pose_asymmetric =
      d > 0 && std::abs(nose.x - cx) > config.pose_asymmetry_threshold * d;
  return out;
}

RegionCrop crop_region(const Image& image, Region region, const Rect& rect) {
  if (!image.contains(rect) || rect.width <= 0 || rect.height <= 0) {
    throw Error(ErrorCode::kRegionExtraction,
                std::string(to_string(region)) + " crop outside the image");
  }
  RegionCrop crop;
  crop.region = region;
  crop.rect = rect;
  const Eigen::Index n = rect.area();
  crop.srgb.resize(n, 3);
  crop.linear.resize(n, 3);
  Eigen::Index row = 0;
  for (int y = rect.y0; y < rect.y1(); ++y) {
    for (int x = rect.x0; x < rect.x1(); ++x, ++row) {
      const Rgb& p = image.at(x, y);
      crop.srgb.row(row) << p.r, p.g, p.b;
      crop.linear.row(row) << srgb_to_linear(p.r), srgb_to_linear(p.g),
          srgb_to_linear(p.b);
    }
  }
  return crop;
}

FaceSample extract_crops(const Image& image, const LandmarkSet& landmarks,
                         const RoiConfig& config) {
  const CropRects rects = compute_crop_rects(image.width(), image.height(), landmarks, config);
  FaceSample sample;
  sample.landmarks = landmarks;
  auto put = [&](Region r, const Rect& rect) {
    sample.crops[static_cast<std::size_t>(r)] = crop_region(image, r, rect);
  };
  put(Region::kForehead, rects.forehead);
  put(Region::kLeftCheek, rects.left_cheek);
  put(Region::kRightCheek, rects.right_cheek);
  if (rects.background) {
    put(Region::kBackground, *rects.background);
  } else {
    sample.flags.emplace_back("background-unavailable");
  }
  if (rects.pose_asymmetric) sample.flags.emplace_back("pose-asymmetric");
  return sample;
}

LandmarkSet parse_landmarks(std::string_view text, int width, int height,
                            std::string* image_field) {
  using nlohmann::json;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParse, std::string("landmarks: ") + e.what());
  }
  if (!j.is_object() || !j.contains("points")) {
    throw Error(ErrorCode::kParse, "landmarks: missing field 'points'");
  }
  if (image_field != nullptr) {
    if (!j.contains("image") || !j["image"].is_string()) {
      throw Error(ErrorCode::kParse, "landmarks: missing string field 'image'");
    }
    *image_field = j["image"].get<std::string>();
  }
  const json& pts = j["points"];
  if (!pts.is_array()) throw Error(ErrorCode::kParse, "landmarks: 'points' must be an array");
  if (pts.size() != kLandmarkCount) {
    throw Error(ErrorCode::kParse, "landmarks: expected 68 points, got " +
                                       std::to_string(pts.size()));
  }
  LandmarkSet lm;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const json& p = pts[i];
    const std::string where = "landmarks: points[" + std::to_string(i) + "]";
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
      throw Error(ErrorCode::kParse, where + " must be [x, y] numbers");
    }
    const double x = p[0].get<double>(), y = p[1].get<double>();
    const bool in_bounds = std::isfinite(x) && std::isfinite(y) && x >= 0 && y >= 0 &&
                           (width <= 0 || x <= width - 1) &&
                           (height <= 0 || y <= height - 1);
    if (!in_bounds) {
      std::ostringstream os;
      os << where << " (" << x << ", " << y << ") out of bounds";
      throw Error(ErrorCode::kParse, os.str());
    }
    lm.points[i] = {x, y};
  }
  return lm;
}

LandmarkSet load_landmarks(const std::filesystem::path& path, int width, int height,
                           std::string* image_field) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open landmarks " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_landmarks(buf.str(), width, height, image_field);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

std::string landmarks_to_json(const LandmarkSet& lm, const std::string& image) {
  nlohmann::json j;
  j["image"] = image;
  nlohmann::json pts = nlohmann::json::array();
  for (const Point& p : lm.points) pts.push_back({p.x, p.y});
  j["points"] = std::move(pts);
  return j.dump();
}

}  // namespace skintone
