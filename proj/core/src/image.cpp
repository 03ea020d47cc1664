#include "skintone/image.hpp"

#include <algorithm>
#include <cmath>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "skintone/error.hpp"

namespace skintone {

Image::Image(int width, int height, Rgb fill)
    : width_(width), height_(height) {
  if (width < 0 || height < 0) {
    throw Error(ErrorCode::kDomain, "negative image dimensions");
  }
  pixels_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height),
                 fill);
}

Image load_image(const std::filesystem::path& path) {
  const cv::Mat bgr = cv::imread(path.string(), cv::IMREAD_COLOR);
  if (bgr.empty()) {
    throw Error(ErrorCode::kIo, "cannot read image " + path.string());
  }
  if (bgr.depth() != CV_8U || bgr.channels() != 3) {
    throw Error(ErrorCode::kIo, "expected 8-bit 3-channel image: " + path.string());
  }
  Image image(bgr.cols, bgr.rows);
  for (int y = 0; y < bgr.rows; ++y) {
    const auto* row = bgr.ptr<cv::Vec3b>(y);
    for (int x = 0; x < bgr.cols; ++x) {
      image.at(x, y) = {row[x][2] / 255.0, row[x][1] / 255.0, row[x][0] / 255.0};
    }
  }
  return image;
}

void save_image(const Image& image, const std::filesystem::path& path) {
  auto code = [](double v) {
    return static_cast<unsigned char>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
  };
  cv::Mat bgr(image.height(), image.width(), CV_8UC3);
  for (int y = 0; y < image.height(); ++y) {
    auto* row = bgr.ptr<cv::Vec3b>(y);
    for (int x = 0; x < image.width(); ++x) {
      const Rgb& p = image.at(x, y);
      row[x] = cv::Vec3b(code(p.b), code(p.g), code(p.r));
    }
  }
  bool ok = false;
  try {
    ok = cv::imwrite(path.string(), bgr);
  } catch (const cv::Exception& e) {
    throw Error(ErrorCode::kIo, "cannot write image " + path.string() + ": " + e.what());
  }
  if (!ok) throw Error(ErrorCode::kIo, "cannot write image " + path.string());
}

}  // namespace skintone
