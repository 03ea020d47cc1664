#include "skintone/kpca.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <json.hpp>

#include "skintone/color.hpp"
#include "skintone/error.hpp"
#include "skintone/random.hpp"

namespace skintone {

using nlohmann::json;

double KernelParams::operator()(const Eigen::Vector3d& x, const Eigen::Vector3d& y) const {
  const double base = gamma * x.dot(y) + coef0;
  double out = 1.0;
  for (int i = 0; i < degree; ++i) out *= base;
  return out;
}

KpcaFit fit_kpca(std::span<const Eigen::Vector3d> bases, std::uint64_t seed,
                 const KpcaConfig& config) {
  if (bases.size() < config.min_bases) {
    throw Error(ErrorCode::kInsufficientData, "KPCA needs at least " +
                                                  std::to_string(config.min_bases) +
                                                  " bases, got " + std::to_string(bases.size()));
  }
  if (config.degree < 1) throw Error(ErrorCode::kPrecondition, "kernel degree must be >= 1");

  KpcaFit fit;
  fit.kernel = {config.degree, config.gamma, config.coef0};
  fit.seed = seed;
  fit.cap = config.cap;
  fit.input_count = bases.size();
  for (std::size_t i : sample_indices(bases.size(), config.cap, seed)) {
    fit.fit_points.push_back(bases[i]);
  }

  const auto m = static_cast<Eigen::Index>(fit.fit_points.size());
  Eigen::MatrixXd K(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      K(i, j) = K(j, i) = fit.kernel(fit.fit_points[i], fit.fit_points[j]);
    }
  }
  fit.row_means = K.rowwise().mean();
  fit.grand_mean = fit.row_means.mean();
  Eigen::MatrixXd Kc = K;
  Kc.rowwise() -= fit.row_means.transpose();
  Kc.colwise() -= fit.row_means;
  Kc.array() += fit.grand_mean;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(Kc);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::kDegenerateFit, "kernel eigendecomposition failed");
  }
  const double lambda = solver.eigenvalues()(m - 1);
  fit.eigenvalue = lambda / static_cast<double>(m);
  if (!(fit.eigenvalue > 1e-12)) {
    throw Error(ErrorCode::kDegenerateFit, "diffuse bases carry no kernel variance");
  }
  // Unit-norm feature-space direction: projections Kc alpha = sqrt(lambda) v,
  // whose mean square is lambda / m.
  fit.alpha = solver.eigenvectors().col(m - 1) / std::sqrt(lambda);

  const Eigen::VectorXd train = Kc * fit.alpha;
  Eigen::VectorXd lum(m);
  for (Eigen::Index i = 0; i < m; ++i) lum(i) = luminance(fit.fit_points[i]);
  const double corr = (train.array() - train.mean()).matrix().dot(
      (lum.array() - lum.mean()).matrix());
  if (corr < 0.0) {
    fit.alpha = -fit.alpha;
    fit.sign_anchor = -1;
  }
  return fit;
}

double project_kpca(const KpcaFit& fit, const Eigen::Vector3d& basis) {
  const auto m = static_cast<Eigen::Index>(fit.fit_points.size());
  Eigen::VectorXd k(m);
  for (Eigen::Index i = 0; i < m; ++i) k(i) = fit.kernel(basis, fit.fit_points[i]);
  const double mean_k = k.mean();
  return ((k.array() - mean_k) - fit.row_means.array() + fit.grand_mean).matrix().dot(fit.alpha);
}

namespace {

json vector_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Eigen::VectorXd vector_from(const json& j, std::size_t expected, const char* what) {
  if (!j.is_array() || j.size() != expected) {
    throw Error(ErrorCode::kParse, std::string("KPCA fit: '") + what + "' has wrong length");
  }
  Eigen::VectorXd v(static_cast<Eigen::Index>(expected));
  for (std::size_t i = 0; i < expected; ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  return v;
}

}  // namespace

std::string to_json(const KpcaFit& fit) {
  json j;
  j["kind"] = "sreds-fit";
  j["kernel"] = {{"type", "polynomial"},
                 {"degree", fit.kernel.degree},
                 {"gamma", fit.kernel.gamma},
                 {"coef0", fit.kernel.coef0}};
  json points = json::array();
  for (const auto& p : fit.fit_points) points.push_back({p(0), p(1), p(2)});
  j["fit_points"] = std::move(points);
  j["alpha"] = vector_json(fit.alpha);
  j["row_means"] = vector_json(fit.row_means);
  j["grand_mean"] = fit.grand_mean;
  j["eigenvalue"] = fit.eigenvalue;
  j["sign_anchor"] = fit.sign_anchor;
  j["seed"] = fit.seed;
  j["cap"] = fit.cap;
  j["input_count"] = fit.input_count;
  return j.dump(2);
}

KpcaFit kpca_fit_from_json(std::string_view text) {
  try {
    const json j = json::parse(text);
    if (j.value("kind", "") != "sreds-fit") throw Error(ErrorCode::kParse, "not a SREDS fit file");
    KpcaFit fit;
    const json& kernel = j.at("kernel");
    fit.kernel.degree = kernel.at("degree").get<int>();
    fit.kernel.gamma = kernel.at("gamma").get<double>();
    fit.kernel.coef0 = kernel.at("coef0").get<double>();
    for (const json& p : j.at("fit_points")) {
      if (!p.is_array() || p.size() != 3) throw Error(ErrorCode::kParse, "fit point is not a 3-vector");
      fit.fit_points.emplace_back(p[0].get<double>(), p[1].get<double>(), p[2].get<double>());
    }
    const std::size_t m = fit.fit_points.size();
    if (m == 0) throw Error(ErrorCode::kParse, "KPCA fit has no fit points");
    fit.alpha = vector_from(j.at("alpha"), m, "alpha");
    fit.row_means = vector_from(j.at("row_means"), m, "row_means");
    fit.grand_mean = j.at("grand_mean").get<double>();
    fit.eigenvalue = j.at("eigenvalue").get<double>();
    fit.sign_anchor = j.at("sign_anchor").get<int>();
    fit.seed = j.at("seed").get<std::uint64_t>();
    fit.cap = j.at("cap").get<std::size_t>();
    fit.input_count = j.at("input_count").get<std::size_t>();
    return fit;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("KPCA fit: ") + e.what());
  }
}

std::string fit_id(const KpcaFit& fit) { return "sreds-" + fnv1a_hex(to_json(fit)); }

}  // namespace skintone
