#pragma once

// SREDS: per-region dichromatic separation, diffuse basis extraction and the
// projection of those bases onto a dataset-level kernel PCA component.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "skintone/config.hpp"
#include "skintone/kpca.hpp"
#include "skintone/metric.hpp"
#include "skintone/nmf.hpp"
#include "skintone/roi.hpp"

namespace skintone {

struct DichromaticDecomposition {
  NmfFactors factors;
  int specular_index = 0;
  Eigen::Vector3d diffuse_basis = Eigen::Vector3d::Zero();   // unit
  Eigen::Vector3d specular_basis = Eigen::Vector3d::Zero();  // unit
  Region region = Region::kForehead;
  std::string image_id;
  std::string subject_id;
};

/// Index of the specular row of H. Ties fall to the brighter (luminance)
/// row, then to row 0.
int assign_specular(const Eigen::Matrix<double, 2, 3>& H, const Eigen::MatrixX2d& W,
                    AssignmentRule rule);

DichromaticDecomposition decompose_patch(const PatchMatrix& V, const NmfConfig& config = {});

/// The crop's linear pixels; region is copied over.
DichromaticDecomposition decompose_patch(const RegionCrop& crop, const NmfConfig& config = {});

// Diffuse bases of the three skin regions of one image; a failed region is
// empty and its reason appended to `failures`.
struct RegionBases {
  std::array<std::optional<Eigen::Vector3d>, 3> diffuse;
  std::vector<std::string> failures;
  bool all_converged = true;
};

RegionBases diffuse_bases(const FaceSample& sample, const NmfConfig& config = {});

/// Mean projection over the surviving regions. Flags "regions-failed" when
/// some regions are missing and throws Error(kMetricUnavailable) when none
/// survive.
MetricRecord sreds_record(const KpcaFit& fit, const std::string& fit_id,
                          const FaceSample& sample, const RegionBases& bases);

MetricRecord compute_sreds(const KpcaFit& fit, const FaceSample& sample,
                           const NmfConfig& config = {});

}  // namespace skintone
