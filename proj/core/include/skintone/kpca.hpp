#pragma once

// Kernel PCA over diffuse basis colors with a polynomial kernel
// k(x, y) = (gamma x.y + c0)^degree. Only the leading component is kept.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "skintone/config.hpp"

namespace skintone {

struct KernelParams {
  int degree = 3;
  double gamma = 1.0 / 3.0;
  double coef0 = 1.0;

  double operator()(const Eigen::Vector3d& x, const Eigen::Vector3d& y) const;
};

struct KpcaFit {
  std::vector<Eigen::Vector3d> fit_points;
  KernelParams kernel;
  Eigen::VectorXd alpha;        // sign applied
  Eigen::VectorXd row_means;    // of the uncentered training kernel
  double grand_mean = 0.0;
  double eigenvalue = 0.0;      // variance of the training projections
  int sign_anchor = 1;
  std::uint64_t seed = 0;
  std::size_t cap = 0;
  std::size_t input_count = 0;
};

/// Throws Error(kInsufficientData) below config.min_bases and
/// Error(kDegenerateFit) when the leading eigenvalue is <= 1e-12.
KpcaFit fit_kpca(std::span<const Eigen::Vector3d> bases, std::uint64_t seed,
                 const KpcaConfig& config = {});

double project_kpca(const KpcaFit& fit, const Eigen::Vector3d& basis);

std::string to_json(const KpcaFit& fit);
KpcaFit kpca_fit_from_json(std::string_view json);

/// "sreds-" followed by the hash of the serialized fit.
std::string fit_id(const KpcaFit& fit);

}  // namespace skintone
