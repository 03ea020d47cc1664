#pragma once

#include <filesystem>
#include <vector>

#include "skintone/color.hpp"

namespace skintone {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct Rect {
  int x0 = 0;
  int y0 = 0;
  int width = 0;
  int height = 0;

  int x1() const { return x0 + width; }  // exclusive
  int y1() const { return y0 + height; }
  long area() const { return static_cast<long>(width) * height; }
  bool overlaps(const Rect& o) const {
    return x0 < o.x1() && o.x0 < x1() && y0 < o.y1() && o.y0 < y1();
  }
  friend bool operator==(const Rect&, const Rect&) = default;
};

// Row-major grid of sRGB-encoded pixels in [0,1].
class Image {
 public:
  Image() = default;
  Image(int width, int height, Rgb fill = {});

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return pixels_.empty(); }

  const Rgb& at(int x, int y) const { return pixels_[index(x, y)]; }
  Rgb& at(int x, int y) { return pixels_[index(x, y)]; }

  bool contains(const Rect& r) const {
    return r.x0 >= 0 && r.y0 >= 0 && r.x1() <= width_ && r.y1() <= height_;
  }
  bool contains(const Point& p) const {
    return p.x >= 0.0 && p.y >= 0.0 && p.x <= width_ - 1 && p.y <= height_ - 1;
  }

  const std::vector<Rgb>& pixels() const { return pixels_; }

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<Rgb> pixels_;
};

/// Reads an 8-bit PNG or JPEG; values divided by 255. Throws Error(kIo).
Image load_image(const std::filesystem::path& path);

/// Writes an 8-bit image (PNG when the extension is .png). Values are
/// rounded to the nearest code. Throws Error(kIo).
void save_image(const Image& image, const std::filesystem::path& path);

}  // namespace skintone
