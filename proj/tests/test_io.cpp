#include <filesystem>
#include <optional>
#include <string>

#include <gtest/gtest.h>
#include <json.hpp>

#include "helpers.hpp"
#include "skintone/config.hpp"
#include "skintone/error.hpp"
#include "skintone/manifest.hpp"

using namespace skintone;

namespace {

std::optional<ErrorCode> code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

}  // namespace

TEST(Config, RoundTripAndHash) {
  RunConfig c;
  c.nmf.max_iter = 250;
  c.kpca.gamma = 0.25;
  c.nmf.assignment = AssignmentRule::kEffectiveRowSum;
  c.seed = 99;
  const RunConfig back = config_from_json(to_json(c));
  EXPECT_EQ(to_json(back), to_json(c));
  EXPECT_EQ(config_hash(back), config_hash(c));
  EXPECT_NE(config_hash(c), config_hash(RunConfig{}));
  EXPECT_EQ(config_hash(RunConfig{}).size(), 16u);
}

TEST(Config, PartialFileKeepsDefaults) {
  const RunConfig c = config_from_json(R"({"ita": {"filter_size": 5}})");
  EXPECT_EQ(c.ita.filter_size, 5);
  EXPECT_EQ(c.nmf.max_iter, 500);
  EXPECT_EQ(c.kpca.cap, 2000u);
}

TEST(Config, Rejections) {
  EXPECT_EQ(code_of([] { config_from_json(R"({"nmf": {"iters": 3}})"); }), ErrorCode::kUsage);
  EXPECT_EQ(code_of([] { config_from_json(R"({"bogus": {}})"); }), ErrorCode::kUsage);
  EXPECT_EQ(code_of([] { config_from_json(R"({"ita": {"filter_size": 4}})"); }), ErrorCode::kUsage);
  EXPECT_EQ(code_of([] { config_from_json(R"({"nmf": {"tol": "x"}})"); }), ErrorCode::kParse);
  EXPECT_EQ(code_of([] { config_from_json("{"); }), ErrorCode::kParse);
  EXPECT_EQ(code_of([] { config_from_json(R"({"nmf": {"assignment": "max"}})"); }), ErrorCode::kUsage);
}

TEST(Config, SchemaIsStable) {
  const auto j = nlohmann::json::parse(to_json(RunConfig{}));
  std::string keys;
  for (auto& [section, v] : j.items()) {
    keys += section + ":";
    if (v.is_object()) {
      for (auto& [k, _] : v.items()) keys += k + ",";
    }
    keys += "\n";
  }
  EXPECT_EQ(keys,
            "ita:bin_width,filter_size,min_pixels,\n"
            "kpca:cap,coef0,degree,gamma,min_bases,\n"
            "nmf:assignment,epsilon,extreme_quantile,max_iter,resolve_extreme_rays,tol,\n"
            "roi:background_fraction,cheek_shrink,forehead_gap,forehead_height_scale,"
            "forehead_width_scale,min_crop_side,pose_asymmetry_threshold,\n"
            "rsr:max_fit_pixels,min_fit_pixels,\n"
            "seed:\n"
            "skinseg:background_normalization,ellipse_scale,exclusion_dilation,max_normalized_value,"
            "min_background_mean,min_background_pixels,min_pixels,outlier_sigma,\n"
            "synth:background_gray,highlight_width,image_size,max_diffuse_level,min_diffuse_level,"
            "noise_sigma,specular_exponent,specular_ratio,\n");
}

TEST(Config, FormatDouble) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(-0.0), "0");
  EXPECT_EQ(format_double(1.0 / 3.0), "0.3333333333333333");
  EXPECT_EQ(std::stod(format_double(0.1 + 0.2)), 0.1 + 0.2);
  EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
  EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
}

TEST(Csv, QuotingAndComments) {
  const auto rows = parse_csv("# note\na,\"b,c\",\"d\"\"e\"\n\"multi\nline\",x,,\n");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"a", "b,c", "d\"e"}));
  EXPECT_EQ(rows[1], (std::vector<std::string>{"multi\nline", "x", "", ""}));
  EXPECT_EQ(csv_field("plain"), "plain");
  EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_field("#x"), "\"#x\"");
  EXPECT_EQ(parse_csv(csv_field("q\"uote,") + "\n")[0][0], "q\"uote,");
  EXPECT_THROW(parse_csv("\"open"), Error);
}

TEST(Manifest, ParseAndRoundTrip) {
  const std::string text =
      "image_path,subject_id,landmarks_path,label\n"
      "img/a.png,s1,lm/a.json,dark\n"
      "img/b.png,s1,lm/b.json,\n";
  const Manifest m = parse_manifest(text, "/data", "set");
  ASSERT_EQ(m.rows.size(), 2u);
  EXPECT_EQ(m.rows[0].label, "dark");
  EXPECT_FALSE(m.rows[1].label);
  EXPECT_EQ(m.resolve(m.rows[1].landmarks_path), std::filesystem::path("/data/lm/b.json"));
  EXPECT_EQ(manifest_csv(m), text);
}

TEST(Manifest, Errors) {
  const std::string h = "image_path,subject_id,landmarks_path,label\n";
  auto message = [](const std::string& t) {
    try {
      parse_manifest(t);
    } catch (const Error& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  EXPECT_NE(message("path,subject\n").find("header"), std::string::npos);
  EXPECT_NE(message(h + "a.png,s,a.json,\na.png,s,b.json,\n").find("duplicate"), std::string::npos);
  EXPECT_NE(message(h + "a.png,,a.json,\n").find("subject_id"), std::string::npos);
  EXPECT_NE(message(h + "a.png,s\n").find("row 2"), std::string::npos);
}

TEST(Manifest, LoadResolvesAgainstDirectory) {
  const auto dir = test::temp_dir("manifest");
  write_text_file(dir / "faces.csv", "image_path,subject_id,landmarks_path,label\nx.png,s,x.json,\n");
  const Manifest m = load_manifest(dir / "faces.csv");
  EXPECT_EQ(m.dataset_id, "faces");
  EXPECT_EQ(m.resolve("x.png"), dir / "x.png");
  EXPECT_EQ(code_of([&] { load_manifest(dir / "missing.csv"); }), ErrorCode::kIo);
}

TEST(MetricsCsv, GoldenSchema) {
  MetricRecord a;
  a.image_id = "img/a.png";
  a.subject_id = "s1";
  a.metric = Metric::kSreds;
  a.value = -0.25;
  a.flags = {"regions-failed", "nmf-not-converged"};
  a.fit_id = "sreds-0123456789abcdef";
  MetricRecord b;
  b.image_id = "img/b,2.png";
  b.subject_id = "s2";
  b.metric = Metric::kIta;
  b.value = 41.5;
  const std::string csv = metrics_csv({a, b}, "feedface00000000");
  const std::string golden = std::string("# skintone ") + SKINTONE_VERSION +
                             " config=feedface00000000\n"
                             "image_id,subject_id,metric,value,flags,fit_id\n"
                             "img/a.png,s1,sreds,-0.25,regions-failed;nmf-not-converged,sreds-0123456789abcdef\n"
                             "\"img/b,2.png\",s2,ita,41.5,,\n";
  EXPECT_EQ(csv, golden);

  const MetricsFile f = parse_metrics_csv(csv);
  EXPECT_EQ(f.config_hash, "feedface00000000");
  EXPECT_EQ(f.version, SKINTONE_VERSION);
  ASSERT_EQ(f.records.size(), 2u);
  EXPECT_EQ(f.records[0].flags, a.flags);
  EXPECT_EQ(f.records[1].image_id, "img/b,2.png");
  EXPECT_TRUE(f.records[1].flags.empty());
  EXPECT_EQ(f.records[0].value, -0.25);
}

TEST(MetricsCsv, Rejections) {
  EXPECT_THROW(parse_metrics_csv("image_id,subject_id,metric,value,flags,fit_id\n"), Error);
  const std::string head = "# skintone 0.1.0 config=x\nimage_id,subject_id,metric,value,flags,fit_id\n";
  EXPECT_THROW(parse_metrics_csv(head + "a,s,hue,1,,\n"), Error);
  EXPECT_THROW(parse_metrics_csv(head + "a,s,ita,1x,,\n"), Error);
  EXPECT_THROW(parse_metrics_csv(head + "a,s,ita,1\n"), Error);
}
