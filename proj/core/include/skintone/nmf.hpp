#pragma once

// Rank-2 non-negative matrix factorization V ~ W H of an n x 3 pixel matrix,
// minimizing 1/2 ||V - WH||_F^2 with W, H >= 0.
//
// Rank-2 NMF of dichromatic data is not unique: any pair of non-negative
// directions whose cone contains the pixels fits exactly. resolve_extreme_rays
// picks the tightest such cone, whose edges are the physically meaningful
// body and interface colors.

#include <vector>

#include <Eigen/Core>

#include "skintone/config.hpp"

namespace skintone {

inline constexpr Eigen::Index kMinPatchRows = 64;

// n x 3 non-negative, finite matrix with n >= kMinPatchRows.
class PatchMatrix {
 public:
  /// Throws Error(kDomain) when an invariant is violated.
  explicit PatchMatrix(Eigen::MatrixX3d data);

  const Eigen::MatrixX3d& data() const { return data_; }
  Eigen::Index rows() const { return data_.rows(); }

 private:
  Eigen::MatrixX3d data_;
};

struct NmfFactors {
  Eigen::MatrixX2d W;  // n x 2 magnitudes
  Eigen::Matrix<double, 2, 3> H = Eigen::Matrix<double, 2, 3>::Zero();  // basis colors
  double residual = 0.0;  // ||V - WH||_F
  int iterations = 0;
  bool converged = false;
  std::vector<double> residual_history;  // filled when requested
};

struct NmfOptions {
  int max_iter = 500;
  double tol = 1e-6;
  double epsilon = 1e-12;
  bool record_history = false;

  static NmfOptions from(const NmfConfig& c) { return {c.max_iter, c.tol, c.epsilon, false}; }
};

/// NNDSVD with zero entries filled by the mean (NNDSVDa), computed on V
/// scaled to unit mean so that init(cV) = (cW, H). Strictly positive output.
/// Throws Error(kInit) for an all-zero V.
NmfFactors nndsvd_ar_init(const PatchMatrix& V);

/// Lee-Seung multiplicative updates from `init`. Stops when the relative
/// residual improvement drops below tol or after max_iter; on exit H rows are
/// scaled to unit norm with W compensating. Throws NumericalFailure on
/// NaN/Inf.
NmfFactors solve_nmf(const PatchMatrix& V, const NmfFactors& init,
                     const NmfOptions& options = {});

/// Moves the rows of H to the extreme rays of the pixel cone within the plane
/// they span (quantile-trimmed at each end), then refits W by exact
/// two-variable non-negative least squares. Rows stay unit norm; the row
/// order (which edge is which) follows the input.
NmfFactors resolve_extreme_rays(const PatchMatrix& V, const NmfFactors& factors,
                                double quantile);

/// Per-row non-negative least squares for fixed H.
Eigen::MatrixX2d nnls_rows(const Eigen::MatrixX3d& V, const Eigen::Matrix<double, 2, 3>& H);

double frobenius_residual(const Eigen::MatrixX3d& V, const Eigen::MatrixX2d& W,
                          const Eigen::Matrix<double, 2, 3>& H);

/// nndsvd_ar_init + solve_nmf (+ resolve_extreme_rays when enabled).
NmfFactors factorize(const PatchMatrix& V, const NmfConfig& config = {});

}  // namespace skintone
