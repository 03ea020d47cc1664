#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <json.hpp>

#include "skintone/error.hpp"
#include "skintone/eval.hpp"
#include "skintone/random.hpp"

using namespace skintone;

namespace {

MetricRecord rec(const std::string& image, const std::string& subject, double v,
                 std::optional<std::string> label = std::nullopt) {
  MetricRecord r;
  r.image_id = image;
  r.subject_id = subject;
  r.value = v;
  r.label = std::move(label);
  return r;
}

std::vector<MetricRecord> from_values(const std::map<std::string, std::vector<double>>& by_subject) {
  std::vector<MetricRecord> out;
  for (const auto& [s, vals] : by_subject) {
    for (std::size_t i = 0; i < vals.size(); ++i) out.push_back(rec(s + "_" + std::to_string(i), s, vals[i]));
  }
  return out;
}

}  // namespace

TEST(Eval, TwoPointZScore) {
  const auto n = normalize_metric({rec("a", "s", 1), rec("b", "s", 3)});
  EXPECT_DOUBLE_EQ(n[0].value, -1.0);
  EXPECT_DOUBLE_EQ(n[1].value, 1.0);
}

TEST(Eval, NormalizePreconditions) {
  EXPECT_THROW(normalize_metric({rec("a", "s", 1)}), Error);
  try {
    normalize_metric({rec("a", "s", 2), rec("b", "s", 2)});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegenerateFit);
  }
}

TEST(Eval, NormalizeMomentsAndIdempotence) {
  Rng rng(10);
  std::vector<MetricRecord> rs;
  for (int i = 0; i < 1000; ++i) rs.push_back(rec("i" + std::to_string(i), "s", 40 * rng.normal() + 7));
  Moments raw;
  const auto n = normalize_metric(rs, &raw);
  double mean = 0, sq = 0;
  for (const auto& r : n) mean += r.value;
  mean /= n.size();
  for (const auto& r : n) sq += (r.value - mean) * (r.value - mean);
  EXPECT_NEAR(mean, 0.0, 1e-9);
  EXPECT_NEAR(std::sqrt(sq / n.size()), 1.0, 1e-9);
  EXPECT_NEAR(raw.mean, 7, 4);
  const auto again = normalize_metric(n);
  for (std::size_t i = 0; i < n.size(); ++i) EXPECT_NEAR(again[i].value, n[i].value, 1e-12);
}

TEST(Eval, AffineInvariance) {
  Rng rng(3);
  std::vector<MetricRecord> rs, ts;
  for (int i = 0; i < 50; ++i) {
    const double v = rng.uniform(-5, 5);
    rs.push_back(rec("i" + std::to_string(i), "s" + std::to_string(i % 7), v));
    ts.push_back(rec("i" + std::to_string(i), "s" + std::to_string(i % 7), 3.5 * v - 12));
  }
  const auto a = normalize_metric(rs), b = normalize_metric(ts);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i].value, b[i].value, 1e-9);
  EXPECT_NEAR(intra_subject_variability(a).mean_std, intra_subject_variability(b).mean_std, 1e-9);
}

TEST(Eval, VariabilityExamples) {
  EXPECT_EQ(intra_subject_variability(from_values({{"a", {0.5, 0.5}}, {"b", {-1, -1, -1}}})).mean_std, 0.0);
  const Variability v = intra_subject_variability(from_values({{"a", {-1, 1}}}));
  EXPECT_DOUBLE_EQ(v.mean_std, 1.0);
  EXPECT_DOUBLE_EQ(v.per_subject.at("a"), 1.0);
}

TEST(Eval, VariabilityOracle) {
  // Hand computation with population std:
  //   a {1,2,3,4}:   mean 2.5, var 1.25        -> 1.118033988749895
  //   b {0,0,6}:     mean 2,   var 8           -> 2.8284271247461903
  //   c {-2,2}:      std 2
  //   d {5}:         excluded
  const auto rs = from_values({{"a", {1, 2, 3, 4}}, {"b", {0, 0, 6}}, {"c", {-2, 2}}, {"d", {5}}});
  const Variability v = intra_subject_variability(rs);
  const double sa = std::sqrt(1.25), sb = std::sqrt(8.0), sc = 2.0;
  EXPECT_NEAR(v.mean_std, (sa + sb + sc) / 3, 1e-12);
  EXPECT_NEAR(v.mean_std_image_weighted, (4 * sa + 3 * sb + 2 * sc) / 9, 1e-12);
  EXPECT_EQ(v.subjects_used, 3u);
  EXPECT_EQ(v.subjects_excluded, 1u);
  EXPECT_EQ(v.images_used, 9u);
}

TEST(Eval, VariabilityAccountingAndShuffle) {
  Rng rng(44);
  std::vector<MetricRecord> rs;
  std::set<std::string> subjects;
  for (int i = 0; i < 200; ++i) {
    const std::string s = "s" + std::to_string(rng.below(60));
    subjects.insert(s);
    rs.push_back(rec("i" + std::to_string(i), s, rng.normal()));
  }
  const Variability v = intra_subject_variability(rs);
  EXPECT_EQ(v.subjects_used + v.subjects_excluded, subjects.size());
  for (int k = 0; k < 5; ++k) {
    std::vector<MetricRecord> shuffled = rs;
    for (std::size_t i = shuffled.size() - 1; i > 0; --i) std::swap(shuffled[i], shuffled[rng.below(i + 1)]);
    const Variability w = intra_subject_variability(shuffled);
    EXPECT_EQ(w.mean_std, v.mean_std);
    EXPECT_EQ(w.per_subject, v.per_subject);
  }
}

TEST(Eval, VariabilityNeedsRepeatedSubject) {
  try {
    intra_subject_variability(from_values({{"a", {1}}, {"b", {2}}}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInsufficientData);
  }
}

TEST(Eval, HistogramsDisjoint) {
  std::vector<MetricRecord> rs;
  for (int i = 0; i < 10; ++i) rs.push_back(rec("l" + std::to_string(i), "s", -2 + 0.1 * i, "light"));
  for (int i = 0; i < 10; ++i) rs.push_back(rec("d" + std::to_string(i), "s", 1 + 0.1 * i, "dark"));
  const LabelHistograms h = label_histograms(rs, 10);
  ASSERT_EQ(h.edges.size(), 11u);
  EXPECT_EQ(h.edges.front(), -2.0);
  EXPECT_DOUBLE_EQ(h.edges.back(), 1.9);
  for (std::size_t b = 0; b < 10; ++b) EXPECT_TRUE(h.counts.at("light")[b] == 0 || h.counts.at("dark")[b] == 0);
}

TEST(Eval, HistogramsNeedTwoLabels) {
  std::vector<MetricRecord> rs = {rec("a", "s", 1, "x"), rec("b", "s", 2, "x"), rec("c", "s", 3)};
  try {
    label_histograms(rs, 5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInsufficientData);
  }
}

TEST(Eval, HistogramsCountingOracle) {
  Rng rng(8);
  std::vector<MetricRecord> rs;
  for (int i = 0; i < 300; ++i) {
    const bool dark = i % 3 == 0;
    rs.push_back(rec("i" + std::to_string(i), "s", (dark ? -1.5 : 1.0) + 0.5 * rng.normal(),
                     dark ? "dark" : "light"));
  }
  const int bins = 17;
  const LabelHistograms h = label_histograms(rs, bins);
  double lo = rs[0].value, hi = rs[0].value;
  for (const auto& r : rs) {
    lo = std::min(lo, r.value);
    hi = std::max(hi, r.value);
  }
  std::map<std::string, std::vector<std::size_t>> oracle;
  for (const auto& r : rs) {
    auto& c = oracle[*r.label];
    c.resize(bins);
    int b = 0;
    while (b < bins - 1 && r.value >= lo + (hi - lo) * (b + 1) / bins) ++b;
    ++c[b];
  }
  EXPECT_EQ(h.counts, oracle);
  std::size_t total = 0;
  for (const auto& [l, c] : h.counts) for (auto n : c) total += n;
  EXPECT_EQ(total, rs.size());
}

TEST(Eval, HistogramCsvSchema) {
  std::vector<MetricRecord> rs = {rec("a", "s", 0, "x"), rec("b", "s", 1, "y")};
  const std::string csv = histograms_csv(label_histograms(rs, 2));
  EXPECT_EQ(csv,
            "label,bin_left,bin_right,count\n"
            "x,0,0.5,1\n"
            "x,0.5,1,0\n"
            "y,0,0.5,0\n"
            "y,0.5,1,1\n");
  const std::string svg = histograms_svg(label_histograms(rs, 2), "t");
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
}

TEST(Eval, SummaryJson) {
  EvalSummary s;
  s.config_hash = "abc";
  MetricSummary m;
  m.metric = Metric::kSreds;
  m.raw = {0.5, 2.0};
  m.variability = intra_subject_variability(from_values({{"a", {-1, 1}}}));
  s.metrics.push_back(m);
  s.warnings.push_back("w");
  const auto j = nlohmann::json::parse(to_json(s));
  EXPECT_EQ(j["config_hash"], "abc");
  EXPECT_EQ(j["std_convention"], "population");
  EXPECT_EQ(j["metrics"][0]["metric"], "sreds");
  EXPECT_EQ(j["metrics"][0]["intra_subject_std"], 1.0);
  EXPECT_EQ(j["metrics"][0]["dataset_mean"], 0.5);
  EXPECT_EQ(j["warnings"][0], "w");
}
