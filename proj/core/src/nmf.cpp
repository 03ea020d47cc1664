#include "skintone/nmf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "skintone/error.hpp"

namespace skintone {

namespace {

using Mat23 = Eigen::Matrix<double, 2, 3>;

// Linear-interpolated quantile of sorted data (numpy's default definition).
double quantile_sorted(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

void normalize_rows(NmfFactors& f) {
  for (int k = 0; k < 2; ++k) {
    const double norm = f.H.row(k).norm();
    if (norm > 0) {
      f.H.row(k) /= norm;
      f.W.col(k) *= norm;
    } else {
      f.H.row(k).setConstant(1.0 / std::sqrt(3.0));
      f.W.col(k).setZero();
    }
  }
}

// Candidate from the data itself: the two extreme rays of the pixels inside
// their best-fitting plane, with exact non-negative W. Optimal whenever V has
// rank <= 2, which plain multiplicative updates approach only sublinearly.
bool cone_candidate(const Eigen::MatrixX3d& V, NmfFactors& out) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(V, Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  if (!(s(0) > 0.0)) return false;
  Eigen::Vector3d a = svd.matrixV().col(0);
  if (a.sum() < 0) a = -a;
  const Eigen::Vector3d b = svd.matrixV().col(1);
  const Eigen::VectorXd ca = V * a, cb = V * b;
  const double floor = 1e-9 * ca.cwiseAbs().maxCoeff();
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (Eigen::Index i = 0; i < V.rows(); ++i) {
    if (ca(i) > floor) {
      lo = std::min(lo, cb(i) / ca(i));
      hi = std::max(hi, cb(i) / ca(i));
    }
  }
  if (!(lo <= hi)) return false;
  Mat23 H;
  H.row(0) = (a + lo * b).cwiseMax(0.0).transpose();
  H.row(1) = (a + hi * b).cwiseMax(0.0).transpose();
  if (!(H.row(0).norm() > 0) || !(H.row(1).norm() > 0)) return false;
  H.row(0).normalize();
  H.row(1).normalize();
  out.H = H;
  out.W = nnls_rows(V, H);
  return out.W.allFinite();
}

}  // namespace

PatchMatrix::PatchMatrix(Eigen::MatrixX3d data) : data_(std::move(data)) {
  if (data_.rows() < kMinPatchRows) {
    throw Error(ErrorCode::kDomain, "patch needs at least 64 pixels, got " +
                                        std::to_string(data_.rows()));
  }
  if (!data_.allFinite() || data_.minCoeff() < 0.0) {
    throw Error(ErrorCode::kDomain, "patch entries must be finite and non-negative");
  }
}

double frobenius_residual(const Eigen::MatrixX3d& V, const Eigen::MatrixX2d& W, const Mat23& H) {
  return (V - W * H).norm();
}

NmfFactors nndsvd_ar_init(const PatchMatrix& patch) {
  const Eigen::MatrixX3d& V = patch.data();
  const double scale = V.mean();
  if (!(scale > 0.0)) throw Error(ErrorCode::kInit, "NNDSVD on an all-zero patch");
  const Eigen::MatrixX3d X = V / scale;

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(X, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  const Eigen::MatrixXd& U = svd.matrixU();
  const Eigen::MatrixXd& Vt = svd.matrixV();
  if (!(s(0) > 0.0) || !U.allFinite()) throw Error(ErrorCode::kInit, "SVD failed");

  NmfFactors f;
  f.W = Eigen::MatrixX2d::Zero(V.rows(), 2);
  f.H.setZero();
  f.W.col(0) = std::sqrt(s(0)) * U.col(0).cwiseAbs();
  f.H.row(0) = std::sqrt(s(0)) * Vt.col(0).cwiseAbs().transpose();

  if (s(1) > 1e-10 * s(0)) {
    const Eigen::VectorXd x = U.col(1);
    const Eigen::Vector3d y = Vt.col(1);
    const Eigen::VectorXd xp = x.cwiseMax(0.0), xn = (-x).cwiseMax(0.0);
    const Eigen::Vector3d yp = y.cwiseMax(0.0), yn = (-y).cwiseMax(0.0);
    const double xpn = xp.norm(), ypn = yp.norm(), xnn = xn.norm(), ynn = yn.norm();
    const double mp = xpn * ypn, mn = xnn * ynn;
    if (mp > 0.0 || mn > 0.0) {
      const bool positive = mp > mn;
      const double sigma = positive ? mp : mn;
      const double c = std::sqrt(s(1) * sigma);
      f.W.col(1) = c * (positive ? Eigen::VectorXd(xp / xpn) : Eigen::VectorXd(xn / xnn));
      f.H.row(1) = c * (positive ? Eigen::Vector3d(yp / ypn) : Eigen::Vector3d(yn / ynn)).transpose();
    }
  }

  // Zeros would stay zero under multiplicative updates. Fill them with a
  // small fraction of the mean of X (which is 1): filling with the full mean
  // lands further from V than a random start does.
  constexpr double kZero = 1e-12;
  constexpr double kFill = 0.01;
  f.W = (f.W.array() < kZero).select(kFill, f.W);
  f.H = (f.H.array() < kZero).select(kFill, f.H);
  f.W *= scale;
  f.residual = frobenius_residual(V, f.W, f.H);
  return f;
}

NmfFactors solve_nmf(const PatchMatrix& patch, const NmfFactors& init, const NmfOptions& options) {
  const Eigen::MatrixX3d& V = patch.data();
  if (options.max_iter < 1) throw Error(ErrorCode::kPrecondition, "max_iter must be >= 1");
  if (!(options.tol > 0)) throw Error(ErrorCode::kPrecondition, "tol must be > 0");
  if (init.W.rows() != V.rows()) throw Error(ErrorCode::kPrecondition, "init W has wrong row count");
  if (init.W.minCoeff() < 0.0 || init.H.minCoeff() < 0.0) {
    throw Error(ErrorCode::kPrecondition, "init factors must be non-negative");
  }

  NmfFactors f;
  f.W = init.W;
  f.H = init.H;
  double previous = frobenius_residual(V, f.W, f.H);
  if (options.record_history) f.residual_history.push_back(previous);

  // Safeguarded jump: taken only when it lowers the objective, so the
  // iterates stay monotone. Zero entries it introduces are floored so the
  // updates can still move them.
  NmfFactors jump;
  if (std::isfinite(previous) && cone_candidate(V, jump)) {
    jump.W = jump.W.cwiseMax(options.epsilon);
    const double r = frobenius_residual(V, jump.W, jump.H);
    if (r < previous) {
      f.W = jump.W;
      f.H = jump.H;
      previous = r;
      if (options.record_history) f.residual_history.push_back(previous);
    }
  }

  const double eps = options.epsilon;
  for (int it = 1; it <= options.max_iter; ++it) {
    const Mat23 h_num = f.W.transpose() * V;
    const Mat23 h_den = (f.W.transpose() * f.W) * f.H;
    f.H = f.H.cwiseProduct(h_num.cwiseQuotient(h_den.cwiseMax(eps)));

    const Eigen::MatrixX2d w_num = V * f.H.transpose();
    const Eigen::MatrixX2d w_den = f.W * (f.H * f.H.transpose());
    f.W = f.W.cwiseProduct(w_num.cwiseQuotient(w_den.cwiseMax(eps)));

    if (!f.W.allFinite() || !f.H.allFinite()) {
      throw NumericalFailure(it, "non-finite value in NMF iteration " + std::to_string(it));
    }
    const double current = frobenius_residual(V, f.W, f.H);
    if (options.record_history) f.residual_history.push_back(current);
    f.iterations = it;
    if (previous == 0.0 || (previous - current) / previous < options.tol) {
      f.converged = true;
      break;
    }
    previous = current;
  }

  normalize_rows(f);
  f.residual = frobenius_residual(V, f.W, f.H);
  return f;
}

Eigen::MatrixX2d nnls_rows(const Eigen::MatrixX3d& V, const Mat23& H) {
  const Eigen::Matrix2d G = H * H.transpose();
  const Eigen::MatrixX2d B = V * H.transpose();
  const double det = G(0, 0) * G(1, 1) - G(0, 1) * G(1, 0);
  const bool singular = !(det > 1e-14 * G(0, 0) * G(1, 1));
  Eigen::MatrixX2d W(V.rows(), 2);
  for (Eigen::Index i = 0; i < V.rows(); ++i) {
    const double b0 = B(i, 0), b1 = B(i, 1);
    if (!singular) {
      const double w0 = (b0 * G(1, 1) - b1 * G(0, 1)) / det;
      const double w1 = (b1 * G(0, 0) - b0 * G(1, 0)) / det;
      if (w0 >= 0.0 && w1 >= 0.0) {
        W.row(i) << w0, w1;
        continue;
      }
    }
    // Best single-basis fits; the objective drop is b^2 / G_kk.
    const double c0 = G(0, 0) > 0 ? std::max(b0, 0.0) / G(0, 0) : 0.0;
    const double c1 = G(1, 1) > 0 ? std::max(b1, 0.0) / G(1, 1) : 0.0;
    const double gain0 = c0 * c0 * G(0, 0), gain1 = c1 * c1 * G(1, 1);
    if (gain0 >= gain1 || singular) {
      W.row(i) << c0, 0.0;
    } else {
      W.row(i) << 0.0, c1;
    }
  }
  return W;
}

NmfFactors resolve_extreme_rays(const PatchMatrix& patch, const NmfFactors& factors,
                                double quantile) {
  const Eigen::MatrixX3d& V = patch.data();
  const Mat23& H = factors.H;
  const Eigen::Matrix2d G = H * H.transpose();
  const double det = G(0, 0) * G(1, 1) - G(0, 1) * G(1, 0);
  if (!(det > 1e-12 * G(0, 0) * G(1, 1))) return factors;

  // Unconstrained plane coordinates of every pixel; t is the position along
  // the H0 -> H1 edge of the pixel's ray.
  const Eigen::MatrixX2d C = (V * H.transpose()) * G.inverse();
  const Eigen::VectorXd sums = C.rowwise().sum();
  const double floor = 1e-9 * sums.cwiseAbs().maxCoeff();
  std::vector<double> t;
  t.reserve(static_cast<std::size_t>(V.rows()));
  for (Eigen::Index i = 0; i < V.rows(); ++i) {
    if (sums(i) > floor) t.push_back(C(i, 1) / sums(i));
  }
  if (t.empty()) return factors;
  std::sort(t.begin(), t.end());
  const double lo = quantile_sorted(t, quantile);
  const double hi = quantile_sorted(t, 1.0 - quantile);

  Mat23 edges;
  edges.row(0) = ((1.0 - lo) * H.row(0) + lo * H.row(1)).cwiseMax(0.0);
  edges.row(1) = ((1.0 - hi) * H.row(0) + hi * H.row(1)).cwiseMax(0.0);
  if (!(edges.row(0).norm() > 0) || !(edges.row(1).norm() > 0)) return factors;
  edges.row(0).normalize();
  edges.row(1).normalize();

  NmfFactors out = factors;
  out.H = edges;
  out.W = nnls_rows(V, edges);
  out.residual = frobenius_residual(V, out.W, out.H);
  return out;
}

NmfFactors factorize(const PatchMatrix& V, const NmfConfig& config) {
  NmfFactors f = solve_nmf(V, nndsvd_ar_init(V), NmfOptions::from(config));
  if (config.resolve_extreme_rays) f = resolve_extreme_rays(V, f, config.extreme_quantile);
  return f;
}

}  // namespace skintone
