#include "skintone/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "skintone/config.hpp"
#include "skintone/error.hpp"

namespace skintone {

Moments population_moments(const std::vector<double>& values) {
  Moments m;
  if (values.empty()) return m;
  for (double v : values) m.mean += v;
  m.mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - m.mean) * (v - m.mean);
  m.std = std::sqrt(ss / static_cast<double>(values.size()));
  return m;
}

std::vector<MetricRecord> normalize_metric(const std::vector<MetricRecord>& records,
                                           Moments* raw) {
  if (records.size() < 2) {
    throw Error(ErrorCode::kPrecondition, "normalization needs at least 2 records");
  }
  std::vector<double> values;
  values.reserve(records.size());
  for (const auto& r : records) values.push_back(r.value);
  const Moments m = population_moments(values);
  if (!(m.std > 0.0) || !std::isfinite(m.std)) {
    throw Error(ErrorCode::kDegenerateFit, "degenerate metric: zero variance");
  }
  if (raw != nullptr) *raw = m;
  std::vector<MetricRecord> out = records;
  for (auto& r : out) {
    r.value = (r.value - m.mean) / m.std;
    for (auto& rv : r.region_values) {
      if (rv) *rv = (*rv - m.mean) / m.std;
    }
  }
  return out;
}

Variability intra_subject_variability(const std::vector<MetricRecord>& records) {
  std::map<std::string, std::vector<double>> by_subject;
  for (const auto& r : records) by_subject[r.subject_id].push_back(r.value);

  Variability v;
  double weighted = 0.0;
  for (auto& [subject, values] : by_subject) {
    if (values.size() < 2) {
      ++v.subjects_excluded;
      continue;
    }
    // Sorting makes the sums independent of record order.
    std::sort(values.begin(), values.end());
    const double s = population_moments(values).std;
    v.per_subject[subject] = s;
    v.mean_std += s;
    weighted += s * static_cast<double>(values.size());
    v.images_used += values.size();
    ++v.subjects_used;
  }
  if (v.subjects_used == 0) {
    throw Error(ErrorCode::kInsufficientData, "no subject has two or more images");
  }
  v.mean_std /= static_cast<double>(v.subjects_used);
  v.mean_std_image_weighted = weighted / static_cast<double>(v.images_used);
  return v;
}

LabelHistograms label_histograms(const std::vector<MetricRecord>& records, int bins) {
  if (bins < 1) throw Error(ErrorCode::kPrecondition, "histogram needs at least one bin");
  std::map<std::string, std::vector<double>> by_label;
  for (const auto& r : records) {
    if (r.label && !r.label->empty()) by_label[*r.label].push_back(r.value);
  }
  if (by_label.size() < 2) {
    throw Error(ErrorCode::kInsufficientData, "histograms need at least two distinct labels");
  }
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& [label, values] : by_label) {
    for (double v : values) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (!(hi > lo)) throw Error(ErrorCode::kDegenerateFit, "histogram values span no range");

  LabelHistograms h;
  const double width = (hi - lo) / bins;
  for (int i = 0; i <= bins; ++i) h.edges.push_back(i == bins ? hi : lo + i * width);
  for (auto& [label, values] : by_label) {
    auto& counts = h.counts[label];
    counts.assign(static_cast<std::size_t>(bins), 0);
    for (double v : values) {
      const int b = std::min(bins - 1, static_cast<int>(std::floor((v - lo) / width)));
      ++counts[static_cast<std::size_t>(std::max(0, b))];
    }
    std::sort(values.begin(), values.end());
    h.label_moments[label] = population_moments(values);
  }
  return h;
}

std::string histograms_csv(const LabelHistograms& h) {
  std::string out = "label,bin_left,bin_right,count\n";
  for (const auto& [label, counts] : h.counts) {
    for (std::size_t i = 0; i < counts.size(); ++i) {
      out += label + "," + format_double(h.edges[i]) + "," + format_double(h.edges[i + 1]) + "," +
             std::to_string(counts[i]) + "\n";
    }
  }
  return out;
}

std::string histograms_svg(const LabelHistograms& h, const std::string& title) {
  constexpr int kWidth = 640, kHeight = 360, kMargin = 40;
  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};
  std::size_t peak = 1;
  for (const auto& [label, counts] : h.counts) {
    for (std::size_t c : counts) peak = std::max(peak, c);
  }
  const std::size_t bins = h.edges.size() - 1;
  const double bw = static_cast<double>(kWidth - 2 * kMargin) / static_cast<double>(bins);
  const double plot_h = kHeight - 2 * kMargin;

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\">\n";
  s << "<text x=\"" << kMargin << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">"
    << title << "</text>\n";
  std::size_t li = 0;
  for (const auto& [label, counts] : h.counts) {
    const char* color = kColors[li % std::size(kColors)];
    for (std::size_t i = 0; i < bins; ++i) {
      if (counts[i] == 0) continue;
      const double bar = plot_h * static_cast<double>(counts[i]) / static_cast<double>(peak);
      s << "<rect x=\"" << format_double(kMargin + bw * static_cast<double>(i)) << "\" y=\""
        << format_double(kHeight - kMargin - bar) << "\" width=\"" << format_double(bw)
        << "\" height=\"" << format_double(bar) << "\" fill=\"" << color
        << "\" fill-opacity=\"0.5\"/>\n";
    }
    s << "<text x=\"" << kWidth - 150 << "\" y=\"" << 24 + 16 * li
      << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"" << color << "\">" << label
      << "</text>\n";
    ++li;
  }
  s << "<line x1=\"" << kMargin << "\" y1=\"" << kHeight - kMargin << "\" x2=\"" << kWidth - kMargin
    << "\" y2=\"" << kHeight - kMargin << "\" stroke=\"black\"/>\n";
  s << "<text x=\"" << kMargin << "\" y=\"" << kHeight - 12
    << "\" font-family=\"sans-serif\" font-size=\"11\">" << format_double(h.edges.front())
    << "</text>\n";
  s << "<text x=\"" << kWidth - kMargin - 40 << "\" y=\"" << kHeight - 12
    << "\" font-family=\"sans-serif\" font-size=\"11\">" << format_double(h.edges.back())
    << "</text>\n";
  s << "</svg>\n";
  return s.str();
}

std::string to_json(const EvalSummary& summary) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["tool"] = std::string("skintone ") + SKINTONE_VERSION;
  j["config_hash"] = summary.config_hash;
  j["std_convention"] = "population";
  j["subject_weighting"] = "unweighted";
  ordered_json metrics = ordered_json::array();
  for (const auto& m : summary.metrics) {
    ordered_json e;
    e["metric"] = to_string(m.metric);
    e["dataset_mean"] = m.raw.mean;
    e["dataset_std"] = m.raw.std;
    e["intra_subject_std"] = m.variability.mean_std;
    e["intra_subject_std_image_weighted"] = m.variability.mean_std_image_weighted;
    e["subjects_used"] = m.variability.subjects_used;
    e["subjects_excluded"] = m.variability.subjects_excluded;
    e["images_used"] = m.variability.images_used;
    if (m.histograms) {
      ordered_json labels = ordered_json::object();
      for (const auto& [label, counts] : m.histograms->counts) {
        const Moments& lm = m.histograms->label_moments.at(label);
        labels[label] = {{"mean", lm.mean}, {"std", lm.std}, {"counts", counts}};
      }
      e["histogram"] = {{"edges", m.histograms->edges}, {"labels", labels}};
    }
    metrics.push_back(std::move(e));
  }
  j["metrics"] = std::move(metrics);
  j["warnings"] = summary.warnings;
  return j.dump(2) + "\n";
}

}  // namespace skintone
