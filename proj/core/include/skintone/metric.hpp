#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace skintone {

enum class Metric { kIta, kRsr, kRsrStar, kSreds };

const char* to_string(Metric m);
std::optional<Metric> parse_metric(std::string_view name);

// One per-image value of one metric.
struct MetricRecord {
  std::string image_id;
  std::string subject_id;
  Metric metric = Metric::kIta;
  double value = 0.0;
  std::array<std::optional<double>, 3> region_values;  // forehead, left, right cheek
  std::string fit_id;                                   // empty for ITA
  std::vector<std::string> flags;
  std::optional<std::string> label;                     // joined from the manifest
};

}  // namespace skintone
