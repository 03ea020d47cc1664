#include "skintone/config.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>

#include <json.hpp>

#include "skintone/error.hpp"

namespace skintone {

using nlohmann::json;

namespace {

// One entry per field: how to write it and how to read it back.
struct Field {
  std::function<json()> get;
  std::function<void(const json&)> set;
};

using FieldMap = std::map<std::string, Field>;

template <typename T>
Field field(T& ref) {
  return {[&ref] { return json(ref); },
          [&ref](const json& j) { ref = j.get<T>(); }};
}

Field assignment_field(AssignmentRule& ref) {
  return {[&ref] { return json(to_string(ref)); },
          [&ref](const json& j) {
            const auto s = j.get<std::string>();
            if (s == "unit-row-sum") {
              ref = AssignmentRule::kUnitRowSum;
            } else if (s == "effective-row-sum") {
              ref = AssignmentRule::kEffectiveRowSum;
            } else {
              throw Error(ErrorCode::kUsage, "unknown assignment rule '" + s + "'");
            }
          }};
}

std::map<std::string, FieldMap> sections(RunConfig& c) {
  return {
      {"roi",
       {{"forehead_width_scale", field(c.roi.forehead_width_scale)},
        {"forehead_height_scale", field(c.roi.forehead_height_scale)},
        {"forehead_gap", field(c.roi.forehead_gap)},
        {"cheek_shrink", field(c.roi.cheek_shrink)},
        {"background_fraction", field(c.roi.background_fraction)},
        {"min_crop_side", field(c.roi.min_crop_side)},
        {"pose_asymmetry_threshold", field(c.roi.pose_asymmetry_threshold)}}},
      {"ita",
       {{"filter_size", field(c.ita.filter_size)},
        {"bin_width", field(c.ita.bin_width)},
        {"min_pixels", field(c.ita.min_pixels)}}},
      {"skinseg",
       {{"ellipse_scale", field(c.skinseg.ellipse_scale)},
        {"exclusion_dilation", field(c.skinseg.exclusion_dilation)},
        {"outlier_sigma", field(c.skinseg.outlier_sigma)},
        {"min_pixels", field(c.skinseg.min_pixels)},
        {"background_normalization", field(c.skinseg.background_normalization)},
        {"min_background_mean", field(c.skinseg.min_background_mean)},
        {"min_background_pixels", field(c.skinseg.min_background_pixels)},
        {"max_normalized_value", field(c.skinseg.max_normalized_value)}}},
      {"rsr",
       {{"max_fit_pixels", field(c.rsr.max_fit_pixels)},
        {"min_fit_pixels", field(c.rsr.min_fit_pixels)}}},
      {"nmf",
       {{"max_iter", field(c.nmf.max_iter)},
        {"tol", field(c.nmf.tol)},
        {"epsilon", field(c.nmf.epsilon)},
        {"resolve_extreme_rays", field(c.nmf.resolve_extreme_rays)},
        {"extreme_quantile", field(c.nmf.extreme_quantile)},
        {"assignment", assignment_field(c.nmf.assignment)}}},
      {"kpca",
       {{"degree", field(c.kpca.degree)},
        {"gamma", field(c.kpca.gamma)},
        {"coef0", field(c.kpca.coef0)},
        {"cap", field(c.kpca.cap)},
        {"min_bases", field(c.kpca.min_bases)}}},
      {"synth",
       {{"image_size", field(c.synth.image_size)},
        {"specular_exponent", field(c.synth.specular_exponent)},
        {"noise_sigma", field(c.synth.noise_sigma)},
        {"min_diffuse_level", field(c.synth.min_diffuse_level)},
        {"max_diffuse_level", field(c.synth.max_diffuse_level)},
        {"specular_ratio", field(c.synth.specular_ratio)},
        {"highlight_width", field(c.synth.highlight_width)},
        {"background_gray", field(c.synth.background_gray)}}},
  };
}

void require(bool ok, const char* name) {
  if (!ok) throw Error(ErrorCode::kUsage, std::string("config value out of range: ") + name);
}

}  // namespace

const char* to_string(AssignmentRule rule) {
  return rule == AssignmentRule::kUnitRowSum ? "unit-row-sum" : "effective-row-sum";
}

void RunConfig::validate() const {
  require(roi.forehead_width_scale > 0, "roi.forehead_width_scale");
  require(roi.forehead_height_scale > 0, "roi.forehead_height_scale");
  require(roi.forehead_gap >= 0, "roi.forehead_gap");
  require(roi.cheek_shrink >= 0 && roi.cheek_shrink < 1, "roi.cheek_shrink");
  require(roi.background_fraction > 0 && roi.background_fraction <= 0.5,
          "roi.background_fraction");
  require(roi.min_crop_side >= 1, "roi.min_crop_side");
  require(roi.pose_asymmetry_threshold > 0, "roi.pose_asymmetry_threshold");
  require(ita.filter_size >= 1 && ita.filter_size % 2 == 1, "ita.filter_size");
  require(ita.bin_width > 0 && ita.bin_width <= 90, "ita.bin_width");
  require(ita.min_pixels >= 1, "ita.min_pixels");
  require(skinseg.ellipse_scale > 0 && skinseg.ellipse_scale <= 1, "skinseg.ellipse_scale");
  require(skinseg.exclusion_dilation >= 0, "skinseg.exclusion_dilation");
  require(skinseg.outlier_sigma > 0, "skinseg.outlier_sigma");
  require(skinseg.min_pixels >= 1, "skinseg.min_pixels");
  require(skinseg.min_background_mean > 0, "skinseg.min_background_mean");
  require(skinseg.min_background_pixels >= 1, "skinseg.min_background_pixels");
  require(skinseg.max_normalized_value >= 1, "skinseg.max_normalized_value");
  require(rsr.max_fit_pixels >= rsr.min_fit_pixels, "rsr.max_fit_pixels");
  require(rsr.min_fit_pixels >= 2, "rsr.min_fit_pixels");
  require(nmf.max_iter >= 1, "nmf.max_iter");
  require(nmf.tol > 0, "nmf.tol");
  require(nmf.epsilon > 0 && nmf.epsilon < 1e-3, "nmf.epsilon");
  require(nmf.extreme_quantile >= 0 && nmf.extreme_quantile < 0.5, "nmf.extreme_quantile");
  require(kpca.degree >= 1, "kpca.degree");
  require(kpca.gamma > 0, "kpca.gamma");
  require(kpca.coef0 >= 0, "kpca.coef0");
  require(kpca.min_bases >= 2, "kpca.min_bases");
  require(kpca.cap >= kpca.min_bases, "kpca.cap");
  require(synth.image_size >= 64, "synth.image_size");
  require(synth.specular_exponent >= 0, "synth.specular_exponent");
  require(synth.noise_sigma >= 0, "synth.noise_sigma");
  require(synth.min_diffuse_level > 0 && synth.min_diffuse_level <= synth.max_diffuse_level,
          "synth.min_diffuse_level");
  require(synth.max_diffuse_level <= 1, "synth.max_diffuse_level");
  require(synth.specular_ratio >= 0, "synth.specular_ratio");
  require(synth.highlight_width > 0, "synth.highlight_width");
  require(synth.background_gray > 0 && synth.background_gray <= 1, "synth.background_gray");
}

std::string to_json(const RunConfig& config) {
  RunConfig copy = config;
  json j = json::object();
  for (auto& [section, fields] : sections(copy)) {
    json s = json::object();
    for (auto& [name, f] : fields) s[name] = f.get();
    j[section] = std::move(s);
  }
  j["seed"] = copy.seed;
  return j.dump(2);
}

RunConfig config_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParse, std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::kParse, "config: expected a JSON object");
  RunConfig config;
  auto map = sections(config);
  for (auto& [key, value] : j.items()) {
    if (key == "seed") {
      config.seed = value.get<std::uint64_t>();
      continue;
    }
    auto s = map.find(key);
    if (s == map.end()) throw Error(ErrorCode::kUsage, "config: unknown section '" + key + "'");
    if (!value.is_object()) throw Error(ErrorCode::kParse, "config: section '" + key + "' must be an object");
    for (auto& [name, v] : value.items()) {
      auto f = s->second.find(name);
      if (f == s->second.end()) {
        throw Error(ErrorCode::kUsage, "config: unknown key '" + key + "." + name + "'");
      }
      try {
        f->second.set(v);
      } catch (const json::exception& e) {
        throw Error(ErrorCode::kParse, "config: " + key + "." + name + ": " + e.what());
      }
    }
  }
  config.validate();
  return config;
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string config_hash(const RunConfig& config) { return fnv1a_hex(to_json(config)); }

std::string format_double(double v) {
  if (v == 0.0) return "0";  // folds -0
  std::array<char, 32> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc{}) return "nan";
  return std::string(buf.data(), end);
}

}  // namespace skintone
