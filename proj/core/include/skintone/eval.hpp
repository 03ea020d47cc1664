#pragma once

// Evaluation protocol: z-score each metric over the dataset, then measure the
// spread of the normalized values within each subject.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "skintone/metric.hpp"

namespace skintone {

struct Moments {
  double mean = 0.0;
  double std = 0.0;  // population
};

Moments population_moments(const std::vector<double>& values);

/// Z-scores over all records (population std). Throws Error(kPrecondition)
/// for fewer than 2 records and Error(kDegenerateFit) for zero variance.
std::vector<MetricRecord> normalize_metric(const std::vector<MetricRecord>& records,
                                           Moments* raw = nullptr);

struct Variability {
  double mean_std = 0.0;                 // unweighted over subjects
  double mean_std_image_weighted = 0.0;
  std::size_t subjects_used = 0;
  std::size_t subjects_excluded = 0;     // single-image subjects
  std::size_t images_used = 0;
  std::map<std::string, double> per_subject;
};

/// Throws Error(kInsufficientData) when no subject has two images.
Variability intra_subject_variability(const std::vector<MetricRecord>& records);

struct LabelHistograms {
  std::vector<double> edges;  // bins + 1, shared by every label
  std::map<std::string, std::vector<std::size_t>> counts;
  std::map<std::string, Moments> label_moments;
};

/// Records without a label are ignored. Throws Error(kInsufficientData) when
/// fewer than two distinct labels are present.
LabelHistograms label_histograms(const std::vector<MetricRecord>& records, int bins);

/// Columns label,bin_left,bin_right,count.
std::string histograms_csv(const LabelHistograms& h);
std::string histograms_svg(const LabelHistograms& h, const std::string& title);

struct MetricSummary {
  Metric metric = Metric::kIta;
  Moments raw;
  Variability variability;
  std::optional<LabelHistograms> histograms;
};

struct EvalSummary {
  std::string config_hash;
  std::vector<MetricSummary> metrics;
  std::vector<std::string> warnings;
};

std::string to_json(const EvalSummary& summary);

}  // namespace skintone
