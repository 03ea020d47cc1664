#include "skintone/ita.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "skintone/error.hpp"

namespace skintone {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double median_of(std::vector<double> v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  double m = v[mid];
  if (v.size() % 2 == 0) {
    const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    m = 0.5 * (m + lower);
  }
  return m;
}

std::vector<double> smooth(const ItaMap& map, int size) {
  if (size <= 1) return map.values;
  const int r = size / 2;
  std::vector<double> out(map.values.size(), kNaN);
  for (int y = 0; y < map.height; ++y) {
    for (int x = 0; x < map.width; ++x) {
      const std::size_t idx = static_cast<std::size_t>(y) * map.width + x;
      if (std::isnan(map.values[idx])) continue;
      double sum = 0.0;
      int count = 0;
      for (int dy = -r; dy <= r; ++dy) {
        const int yy = std::clamp(y + dy, 0, map.height - 1);
        for (int dx = -r; dx <= r; ++dx) {
          const int xx = std::clamp(x + dx, 0, map.width - 1);
          const double v = map.values[static_cast<std::size_t>(yy) * map.width + xx];
          if (std::isnan(v)) continue;
          sum += v;
          ++count;
        }
      }
      out[idx] = sum / count;
    }
  }
  return out;
}

}  // namespace

std::optional<double> pixel_ita(const Lab& lab) {
  const double dl = lab.L - 50.0;
  if (lab.b == 0.0) {
    if (dl == 0.0) return std::nullopt;
    return dl > 0 ? 90.0 : -90.0;
  }
  return std::atan(dl / lab.b) * 180.0 / std::numbers::pi;
}

ItaMap ita_map(const RegionCrop& crop) {
  ItaMap map;
  map.width = crop.rect.width;
  map.height = crop.rect.height;
  map.values.resize(static_cast<std::size_t>(crop.srgb.rows()));
  for (Eigen::Index i = 0; i < crop.srgb.rows(); ++i) {
    const Rgb p{crop.srgb(i, 0), crop.srgb(i, 1), crop.srgb(i, 2)};
    map.values[static_cast<std::size_t>(i)] = pixel_ita(rgb_to_lab(p)).value_or(kNaN);
  }
  return map;
}

double histogram_mode(const std::vector<double>& angles, double bin_width) {
  // Bins are centered on multiples of bin_width; the two end bins are cut at
  // +-90 so every returned center stays inside the open range.
  const int half = static_cast<int>(std::ceil(90.0 / bin_width - 1e-9));
  const int bins = 2 * half + 1;
  std::vector<long> counts(static_cast<std::size_t>(bins), 0);
  for (double a : angles) {
    const int b = static_cast<int>(std::floor(a / bin_width + 0.5)) + half;
    counts[static_cast<std::size_t>(std::clamp(b, 0, bins - 1))]++;
  }
  auto center = [&](int b) {
    const double c = (b - half) * bin_width;
    const double lo = std::max(-90.0, c - 0.5 * bin_width);
    const double hi = std::min(90.0, c + 0.5 * bin_width);
    return 0.5 * (lo + hi);
  };
  const long best = *std::max_element(counts.begin(), counts.end());
  const double median = median_of(angles);
  int chosen = -1;
  for (int b = 0; b < bins; ++b) {
    if (counts[static_cast<std::size_t>(b)] != best) continue;
    if (chosen < 0 || std::abs(center(b) - median) < std::abs(center(chosen) - median)) {
      chosen = b;
    }
  }
  return center(chosen);
}

double region_ita(const ItaMap& map, const ItaConfig& config) {
  const auto valid = static_cast<int>(std::count_if(
      map.values.begin(), map.values.end(), [](double v) { return !std::isnan(v); }));
  if (valid < config.min_pixels) {
    throw Error(ErrorCode::kInsufficientPixels,
                "ITA needs " + std::to_string(config.min_pixels) + " valid pixels, got " +
                    std::to_string(valid));
  }
  const std::vector<double> filtered = smooth(map, config.filter_size);
  std::vector<double> kept;
  kept.reserve(static_cast<std::size_t>(valid));
  for (double v : filtered) {
    if (!std::isnan(v)) kept.push_back(v);
  }
  return histogram_mode(kept, config.bin_width);
}

double region_ita(const RegionCrop& crop, const ItaConfig& config) {
  return region_ita(ita_map(crop), config);
}

ItaResult compute_ita(const FaceSample& sample, const ItaConfig& config) {
  ItaResult result;
  double sum = 0.0;
  for (std::size_t i = 0; i < kSkinRegions.size(); ++i) {
    const Region r = kSkinRegions[i];
    try {
      result.per_region[i] = region_ita(sample.crop(r), config);
    } catch (const Error& e) {
      throw Error(ErrorCode::kMetricUnavailable,
                  std::string("ITA unavailable: ") + to_string(r) + ": " + e.what());
    }
    sum += result.per_region[i];
  }
  result.value = sum / 3.0;
  return result;
}

}  // namespace skintone
