#include "skintone/sreds.hpp"

#include <cmath>

#include "skintone/color.hpp"
#include "skintone/error.hpp"

namespace skintone {

const char* to_string(Metric m) {
  switch (m) {
    case Metric::kIta: return "ita";
    case Metric::kRsr: return "rsr";
    case Metric::kRsrStar: return "rsr-star";
    case Metric::kSreds: return "sreds";
  }
  return "?";
}

std::optional<Metric> parse_metric(std::string_view name) {
  for (Metric m : {Metric::kIta, Metric::kRsr, Metric::kRsrStar, Metric::kSreds}) {
    if (name == to_string(m)) return m;
  }
  return std::nullopt;
}

int assign_specular(const Eigen::Matrix<double, 2, 3>& H, const Eigen::MatrixX2d& W,
                    AssignmentRule rule) {
  double score[2];
  for (int k = 0; k < 2; ++k) {
    const double norm = H.row(k).norm();
    if (rule == AssignmentRule::kUnitRowSum) {
      score[k] = norm > 0 ? H.row(k).sum() / norm : 0.0;
    } else {
      score[k] = H.row(k).sum() * (W.rows() > 0 ? W.col(k).mean() : 1.0);
    }
  }
  const double tol = 1e-12 * std::max(std::abs(score[0]), std::abs(score[1]));
  if (std::abs(score[0] - score[1]) > tol) return score[1] > score[0] ? 1 : 0;
  const double l0 = luminance(Eigen::Vector3d(H.row(0).transpose()));
  const double l1 = luminance(Eigen::Vector3d(H.row(1).transpose()));
  return l1 > l0 ? 1 : 0;
}

DichromaticDecomposition decompose_patch(const PatchMatrix& V, const NmfConfig& config) {
  DichromaticDecomposition d;
  d.factors = factorize(V, config);
  d.specular_index = assign_specular(d.factors.H, d.factors.W, config.assignment);
  d.specular_basis = d.factors.H.row(d.specular_index).transpose().normalized();
  d.diffuse_basis = d.factors.H.row(1 - d.specular_index).transpose().normalized();
  return d;
}

DichromaticDecomposition decompose_patch(const RegionCrop& crop, const NmfConfig& config) {
  DichromaticDecomposition d = decompose_patch(PatchMatrix(crop.linear), config);
  d.region = crop.region;
  return d;
}

RegionBases diffuse_bases(const FaceSample& sample, const NmfConfig& config) {
  RegionBases out;
  for (std::size_t i = 0; i < kSkinRegions.size(); ++i) {
    const Region r = kSkinRegions[i];
    if (!sample.has(r)) {
      out.failures.push_back(std::string(to_string(r)) + ": missing crop");
      continue;
    }
    try {
      const DichromaticDecomposition d = decompose_patch(sample.crop(r), config);
      out.diffuse[i] = d.diffuse_basis;
      out.all_converged = out.all_converged && d.factors.converged;
    } catch (const Error& e) {
      out.failures.push_back(std::string(to_string(r)) + ": " + e.what());
    }
  }
  return out;
}

MetricRecord sreds_record(const KpcaFit& fit, const std::string& fit_id,
                          const FaceSample& sample, const RegionBases& bases) {
  MetricRecord rec;
  rec.image_id = sample.image_id;
  rec.subject_id = sample.subject_id;
  rec.metric = Metric::kSreds;
  rec.fit_id = fit_id;
  rec.label = sample.label;
  double sum = 0.0;
  int count = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    if (!bases.diffuse[i]) continue;
    const double v = project_kpca(fit, *bases.diffuse[i]);
    rec.region_values[i] = v;
    sum += v;
    ++count;
  }
  if (count == 0) {
    std::string why = "SREDS unavailable for " + sample.image_id;
    for (const auto& f : bases.failures) why += "; " + f;
    throw Error(ErrorCode::kMetricUnavailable, why);
  }
  rec.value = sum / count;
  if (count < 3) rec.flags.emplace_back("regions-failed");
  if (!bases.all_converged) rec.flags.emplace_back("nmf-not-converged");
  return rec;
}

MetricRecord compute_sreds(const KpcaFit& fit, const FaceSample& sample,
                           const NmfConfig& config) {
  return sreds_record(fit, fit_id(fit), sample, diffuse_bases(sample, config));
}

}  // namespace skintone
