#include "skintone/rsr.hpp"

#include <Eigen/Eigenvalues>
#include <json.hpp>

#include "skintone/error.hpp"
#include "skintone/random.hpp"

namespace skintone {

using nlohmann::json;

const char* to_string(RsrVariant v) { return v == RsrVariant::kRsr ? "rsr" : "rsr-star"; }

RsrFit fit_rsr(std::span<const SkinPixelSet> samples, std::uint64_t seed, RsrVariant variant,
               const RsrConfig& config) {
  std::size_t total = 0;
  for (const auto& s : samples) total += static_cast<std::size_t>(s.size());
  if (total < config.min_fit_pixels) {
    throw Error(ErrorCode::kInsufficientData,
                "RSR fit needs " + std::to_string(config.min_fit_pixels) + " pixels, got " +
                    std::to_string(total));
  }

  // Selected global indices in increasing order; walk the sets once.
  const auto chosen = sample_indices(total, config.max_fit_pixels, seed);
  Eigen::MatrixX3d pool(static_cast<Eigen::Index>(chosen.size()), 3);
  {
    std::size_t set = 0, offset = 0;
    for (std::size_t i = 0; i < chosen.size(); ++i) {
      while (chosen[i] >= offset + static_cast<std::size_t>(samples[set].size())) {
        offset += static_cast<std::size_t>(samples[set].size());
        ++set;
      }
      pool.row(static_cast<Eigen::Index>(i)) =
          samples[set].pixels.row(static_cast<Eigen::Index>(chosen[i] - offset));
    }
  }

  const Eigen::RowVector3d mean = pool.colwise().mean();
  const Eigen::MatrixX3d centered = pool.rowwise() - mean;
  const Eigen::Matrix3d cov = (centered.transpose() * centered) / static_cast<double>(pool.rows());

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(cov);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::kDegenerateFit, "covariance eigendecomposition failed");
  }
  const Eigen::Vector3d values = solver.eigenvalues();  // ascending
  const double scale = std::max(1.0, mean.cwiseAbs().maxCoeff());
  if (values(2) <= 1e-20 * scale * scale) {
    throw Error(ErrorCode::kDegenerateFit, "skin pixels have zero variance");
  }

  RsrFit fit;
  fit.axis = solver.eigenvectors().col(2).normalized();
  const double s = fit.axis.sum();
  const bool flip = s < 0 || (s == 0 && fit.axis(0) < 0);
  if (flip) fit.axis = -fit.axis;
  fit.sign_anchor = flip ? -1 : 1;
  fit.center = mean.transpose();
  fit.eigenvalues = values.reverse();
  fit.fit_pixel_count = chosen.size();
  fit.total_pixel_count = total;
  fit.seed = seed;
  fit.variant = variant;
  return fit;
}

double project_rsr(const RsrFit& fit, const Eigen::MatrixX3d& pixels) {
  if (pixels.rows() == 0) throw Error(ErrorCode::kPrecondition, "empty skin pixel set");
  const Eigen::Vector3d mean = pixels.colwise().mean().transpose();
  return (mean - fit.center).dot(fit.axis);
}

double project_rsr(const RsrFit& fit, const SkinPixelSet& pixels) {
  return project_rsr(fit, pixels.pixels);
}

double compute_rsr_star(const RsrFit& fit, const FaceSample& sample) {
  return project_rsr(fit, patch_union(sample));
}

namespace {

json vec_json(const Eigen::Vector3d& v) { return json::array({v(0), v(1), v(2)}); }

Eigen::Vector3d vec_from(const json& j) {
  if (!j.is_array() || j.size() != 3) throw Error(ErrorCode::kParse, "expected a 3-vector");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

}  // namespace

std::string to_json(const RsrFit& fit) {
  json j;
  j["kind"] = "rsr-fit";
  j["variant"] = to_string(fit.variant);
  j["axis"] = vec_json(fit.axis);
  j["center"] = vec_json(fit.center);
  j["eigenvalues"] = vec_json(fit.eigenvalues);
  j["fit_pixel_count"] = fit.fit_pixel_count;
  j["total_pixel_count"] = fit.total_pixel_count;
  j["sign_anchor"] = fit.sign_anchor;
  j["seed"] = fit.seed;
  return j.dump(2);
}

RsrFit rsr_fit_from_json(std::string_view text) {
  try {
    const json j = json::parse(text);
    if (j.value("kind", "") != "rsr-fit") throw Error(ErrorCode::kParse, "not an RSR fit file");
    RsrFit fit;
    const auto variant = j.at("variant").get<std::string>();
    if (variant == "rsr") {
      fit.variant = RsrVariant::kRsr;
    } else if (variant == "rsr-star") {
      fit.variant = RsrVariant::kRsrStar;
    } else {
      throw Error(ErrorCode::kParse, "unknown RSR variant '" + variant + "'");
    }
    fit.axis = vec_from(j.at("axis"));
    fit.center = vec_from(j.at("center"));
    fit.eigenvalues = vec_from(j.at("eigenvalues"));
    fit.fit_pixel_count = j.at("fit_pixel_count").get<std::size_t>();
    fit.total_pixel_count = j.at("total_pixel_count").get<std::size_t>();
    fit.sign_anchor = j.at("sign_anchor").get<int>();
    fit.seed = j.at("seed").get<std::uint64_t>();
    if (std::abs(fit.axis.norm() - 1.0) > 1e-9) {
      throw Error(ErrorCode::kParse, "RSR axis is not unit length");
    }
    return fit;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("RSR fit: ") + e.what());
  }
}

std::string fit_id(const RsrFit& fit) {
  return std::string(to_string(fit.variant)) + "-" + fnv1a_hex(to_json(fit));
}

}  // namespace skintone
