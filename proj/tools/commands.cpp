#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <ostream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "skintone/config.hpp"
#include "skintone/error.hpp"
#include "skintone/eval.hpp"
#include "skintone/image.hpp"
#include "skintone/ita.hpp"
#include "skintone/kpca.hpp"
#include "skintone/manifest.hpp"
#include "skintone/roi.hpp"
#include "skintone/rsr.hpp"
#include "skintone/skinseg.hpp"
#include "skintone/sreds.hpp"
#include "skintone/synth.hpp"

namespace skintone::cli {

namespace fs = std::filesystem;

namespace {

// Runs f(0..n-1) on up to `jobs` threads. f must not throw; results are
// written to per-index slots so the output never depends on scheduling.
template <class F>
void parallel_for(std::size_t n, int jobs, F&& f) {
  const auto workers = static_cast<std::size_t>(std::max(1, jobs));
  if (workers == 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> threads;
  for (std::size_t t = 0; t < std::min(workers, n); ++t) {
    threads.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) f(i);
    });
  }
  for (auto& t : threads) t.join();
}

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::kIo:
    case ErrorCode::kParse:
    case ErrorCode::kUsage:
      return kUsageOrIo;
    default:
      return kEmpty;
  }
}

RunConfig load_config(const std::optional<fs::path>& path, std::optional<std::uint64_t> seed) {
  RunConfig config = path ? config_from_json(read_text_file(*path)) : RunConfig{};
  if (seed) config.seed = *seed;
  config.validate();
  return config;
}

struct ImageWork {
  std::string image_id;
  std::string subject_id;
  std::optional<std::string> label;
  std::vector<std::string> flags;
  std::string skip_reason;  // non-empty: skipped
  std::optional<ItaResult> ita;
  std::optional<SkinPixelSet> pixels;
  std::optional<RegionBases> bases;
};

void process_image(const Manifest& manifest, const ManifestRow& row, Metric metric,
                   const RunConfig& config, ImageWork& w) {
  w.image_id = row.image_path;
  w.subject_id = row.subject_id;
  w.label = row.label;
  if (row.landmarks_path.empty()) {
    w.skip_reason = "no landmarks";
    return;
  }
  try {
    const Image image = load_image(manifest.resolve(row.image_path));
    const LandmarkSet lm = load_landmarks(manifest.resolve(row.landmarks_path), image.width(),
                                          image.height());
    FaceSample sample = extract_crops(image, lm, config.roi);
    sample.image_id = w.image_id;
    sample.subject_id = w.subject_id;
    sample.label = w.label;
    w.flags = sample.flags;
    switch (metric) {
      case Metric::kIta:
        w.ita = compute_ita(sample, config.ita);
        break;
      case Metric::kRsr:
        w.pixels = segment_skin(image, sample, config.skinseg, &w.flags);
        break;
      case Metric::kRsrStar:
        w.pixels = patch_union(sample);
        break;
      case Metric::kSreds: {
        RegionBases b = diffuse_bases(sample, config.nmf);
        if (std::none_of(b.diffuse.begin(), b.diffuse.end(), [](const auto& d) { return d.has_value(); })) {
          w.skip_reason = "all regions failed";
          for (const auto& f : b.failures) w.skip_reason += "; " + f;
          return;
        }
        w.bases = std::move(b);
        break;
      }
    }
  } catch (const std::exception& e) {
    w.skip_reason = e.what();
  }
}

std::string skipped_csv(const std::vector<ImageWork>& work) {
  std::string out = "image_id,reason\n";
  for (const auto& w : work) {
    if (!w.skip_reason.empty()) out += csv_field(w.image_id) + "," + csv_field(w.skip_reason) + "\n";
  }
  return out;
}

}  // namespace

int cmd_compute(const ComputeOptions& options, std::ostream& out, std::ostream& err) {
  const bool data_driven = options.metric != Metric::kIta;
  if (data_driven && !options.fit && !options.fit_out) {
    err << "error: metric " << to_string(options.metric) << " needs --fit or --fit-out\n";
    return kUsageOrIo;
  }
  if (options.fit && options.fit_out) {
    err << "error: --fit and --fit-out are mutually exclusive\n";
    return kUsageOrIo;
  }
  if (!data_driven && (options.fit || options.fit_out)) {
    err << "warning: ita uses no fit; ignoring --fit/--fit-out\n";
  }

  try {
    const RunConfig config = load_config(options.config, options.seed);
    const std::string hash = config_hash(config);
    const Manifest manifest = load_manifest(options.manifest);

    std::vector<ImageWork> work(manifest.rows.size());
    parallel_for(work.size(), options.jobs, [&](std::size_t i) {
      process_image(manifest, manifest.rows[i], options.metric, config, work[i]);
    });

    std::vector<MetricRecord> records;
    auto base_record = [&](const ImageWork& w) {
      MetricRecord r;
      r.image_id = w.image_id;
      r.subject_id = w.subject_id;
      r.metric = options.metric;
      r.flags = w.flags;
      r.label = w.label;
      return r;
    };
    auto ok = [](const ImageWork& w) { return w.skip_reason.empty(); };

    if (options.metric == Metric::kIta) {
      for (const auto& w : work) {
        if (!ok(w)) continue;
        MetricRecord r = base_record(w);
        r.value = w.ita->value;
        for (std::size_t k = 0; k < 3; ++k) r.region_values[k] = w.ita->per_region[k];
        records.push_back(std::move(r));
      }
    } else if (options.metric == Metric::kRsr || options.metric == Metric::kRsrStar) {
      const RsrVariant variant =
          options.metric == Metric::kRsr ? RsrVariant::kRsr : RsrVariant::kRsrStar;
      RsrFit fit;
      if (options.fit) {
        fit = rsr_fit_from_json(read_text_file(*options.fit));
        if (fit.variant != variant) {
          err << "error: fit file is for " << to_string(fit.variant) << ", not "
              << to_string(variant) << "\n";
          return kUsageOrIo;
        }
      } else {
        std::vector<SkinPixelSet> sets;
        for (const auto& w : work) {
          if (ok(w)) sets.push_back(*w.pixels);
        }
        fit = fit_rsr(sets, config.seed, variant, config.rsr);
        write_text_file(*options.fit_out, to_json(fit) + "\n");
      }
      const std::string id = fit_id(fit);
      for (const auto& w : work) {
        if (!ok(w)) continue;
        MetricRecord r = base_record(w);
        r.value = project_rsr(fit, *w.pixels);
        r.fit_id = id;
        records.push_back(std::move(r));
      }
    } else {
      KpcaFit fit;
      if (options.fit) {
        fit = kpca_fit_from_json(read_text_file(*options.fit));
      } else {
        std::vector<Eigen::Vector3d> bases;
        for (const auto& w : work) {
          if (!ok(w)) continue;
          for (const auto& d : w.bases->diffuse) {
            if (d) bases.push_back(*d);
          }
        }
        fit = fit_kpca(bases, config.seed, config.kpca);
        write_text_file(*options.fit_out, to_json(fit) + "\n");
      }
      const std::string id = fit_id(fit);
      for (const auto& w : work) {
        if (!ok(w)) continue;
        FaceSample ids;
        ids.image_id = w.image_id;
        ids.subject_id = w.subject_id;
        ids.label = w.label;
        MetricRecord r = sreds_record(fit, id, ids, *w.bases);
        r.flags.insert(r.flags.begin(), w.flags.begin(), w.flags.end());
        records.push_back(std::move(r));
      }
    }

    std::size_t skipped = 0;
    for (const auto& w : work) {
      if (!ok(w)) {
        err << "skipped " << w.image_id << ": " << w.skip_reason << "\n";
        ++skipped;
      }
    }
    const std::string csv = metrics_csv(records, hash);
    if (options.out.empty()) {
      out << csv;
    } else {
      write_text_file(options.out, csv);
      write_text_file(fs::path(options.out.string() + ".skipped.csv"), skipped_csv(work));
    }
    err << to_string(options.metric) << ": " << records.size() << " records, " << skipped
        << " skipped\n";
    return records.empty() ? kEmpty : kOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
}

int cmd_eval(const EvalOptions& options, std::ostream& err) {
  try {
    if (options.metrics.empty()) {
      err << "error: eval needs at least one metrics CSV\n";
      return kUsageOrIo;
    }
    const Manifest manifest = load_manifest(options.manifest);
    std::map<std::string, const ManifestRow*> by_image;
    for (const auto& row : manifest.rows) by_image[row.image_path] = &row;

    EvalSummary summary;
    std::map<Metric, std::vector<MetricRecord>> by_metric;
    std::map<Metric, std::map<std::string, bool>> seen;
    std::size_t joined = 0, total = 0;
    for (const auto& path : options.metrics) {
      MetricsFile file = parse_metrics_csv(read_text_file(path));
      if (summary.config_hash.empty()) {
        summary.config_hash = file.config_hash;
      } else if (file.config_hash != summary.config_hash) {
        if (!options.force) {
          err << "error: " << path.string() << " was produced under config " << file.config_hash
              << ", expected " << summary.config_hash << " (use --force to merge)\n";
          return kUsageOrIo;
        }
        summary.warnings.push_back("merged mixed config hashes: " + file.config_hash);
      }
      for (auto& r : file.records) {
        ++total;
        const auto it = by_image.find(r.image_id);
        if (it == by_image.end()) {
          const std::string w = path.filename().string() + ": unknown image " + r.image_id;
          err << "warning: " << w << "\n";
          summary.warnings.push_back(w);
          continue;
        }
        if (seen[r.metric][r.image_id]) {
          const std::string w = "duplicate " + std::string(to_string(r.metric)) + " record for " +
                                r.image_id;
          err << "warning: " << w << "\n";
          summary.warnings.push_back(w);
          continue;
        }
        seen[r.metric][r.image_id] = true;
        r.subject_id = it->second->subject_id;
        r.label = it->second->label;
        by_metric[r.metric].push_back(std::move(r));
        ++joined;
      }
    }
    if (joined == 0) {
      err << "error: none of " << total << " records joined the manifest\n";
      return kEmpty;
    }

    fs::create_directories(options.out);
    for (auto& [metric, records] : by_metric) {
      MetricSummary m;
      m.metric = metric;
      std::vector<MetricRecord> normalized;
      try {
        normalized = normalize_metric(records, &m.raw);
        m.variability = intra_subject_variability(normalized);
      } catch (const Error& e) {
        const std::string w = std::string(to_string(metric)) + ": " + e.what();
        err << "warning: " << w << "\n";
        summary.warnings.push_back(w);
        continue;
      }
      try {
        m.histograms = label_histograms(normalized, options.bins);
        const std::string stem = std::string("histograms_") + to_string(metric);
        write_text_file(options.out / (stem + ".csv"), histograms_csv(*m.histograms));
        if (options.plots) {
          write_text_file(options.out / (stem + ".svg"),
                          histograms_svg(*m.histograms, to_string(metric)));
        }
      } catch (const Error& e) {
        if (e.code() == ErrorCode::kIo) throw;
        summary.warnings.push_back(std::string(to_string(metric)) + " histograms: " + e.what());
      }
      summary.metrics.push_back(std::move(m));
    }
    write_text_file(options.out / "summary.json", to_json(summary));
    return summary.metrics.empty() ? kEmpty : kOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kUsageOrIo;
  }
}

int cmd_synth(const SynthOptions& options, std::ostream& err) {
  try {
    const RunConfig config = load_config(options.config, options.seed);
    std::vector<double> angles = options.angles;
    if (options.images_per_subject) {
      const int n = *options.images_per_subject;
      if (n < 1) throw Error(ErrorCode::kUsage, "--images-per-subject must be >= 1");
      if (!angles.empty() && static_cast<int>(angles.size()) != n) {
        throw Error(ErrorCode::kUsage, "--angles and --images-per-subject disagree");
      }
      if (angles.empty()) {
        for (int j = 0; j < n; ++j) angles.push_back(n == 1 ? 0.0 : -45.0 + 90.0 * j / (n - 1));
      }
    }
    if (angles.empty()) angles = {-45, -30, -15, 0, 15, 30, 45};
    if (options.subjects < 1) throw Error(ErrorCode::kUsage, "--subjects must be >= 1");

    struct Job {
      std::string subject;
      std::string stem;
      FaceScene scene;
      std::string label;
    };
    std::vector<Job> jobs;
    Rng rng(config.seed);
    for (int s = 0; s < options.subjects; ++s) {
      char subject[16];
      std::snprintf(subject, sizeof subject, "s%03d", s);
      const double darkness = rng.uniform();
      const std::uint64_t base = rng.next();
      for (std::size_t j = 0; j < angles.size(); ++j) {
        char stem[48];
        std::snprintf(stem, sizeof stem, "%s_%02zu", subject, j);
        FaceScene scene;
        scene.darkness = darkness;
        scene.incidence_angle = angles[j];
        scene.seed = base + j;
        jobs.push_back({subject, stem, scene, darkness >= 0.5 ? "dark" : "light"});
      }
    }

    fs::create_directories(options.out / "images");
    fs::create_directories(options.out / "landmarks");
    std::vector<RenderedFace> faces(jobs.size());
    std::vector<std::string> failures(jobs.size());
    parallel_for(jobs.size(), options.jobs, [&](std::size_t i) {
      try {
        faces[i] = render_face(jobs[i].scene, config.synth);
        const std::string image = "images/" + jobs[i].stem + ".png";
        save_image(faces[i].image, options.out / image);
        write_text_file(options.out / ("landmarks/" + jobs[i].stem + ".json"),
                        landmarks_to_json(faces[i].landmarks, image) + "\n");
      } catch (const std::exception& e) {
        failures[i] = e.what();
      }
    });
    for (const auto& f : failures) {
      if (!f.empty()) throw Error(ErrorCode::kIo, f);
    }

    Manifest manifest;
    nlohmann::ordered_json truth = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      const std::string image = "images/" + jobs[i].stem + ".png";
      manifest.rows.push_back(
          {image, jobs[i].subject, "landmarks/" + jobs[i].stem + ".json", jobs[i].label});
      const Eigen::Vector3d& cb = faces[i].body_color;
      truth.push_back({{"image", image},
                       {"subject_id", jobs[i].subject},
                       {"label", jobs[i].label},
                       {"darkness", jobs[i].scene.darkness},
                       {"incidence_angle", jobs[i].scene.incidence_angle},
                       {"body_color", {cb(0), cb(1), cb(2)}},
                       {"interface_color", {jobs[i].scene.interface_color(0),
                                            jobs[i].scene.interface_color(1),
                                            jobs[i].scene.interface_color(2)}},
                       {"diffuse_level", faces[i].diffuse_level},
                       {"highlight_peak", faces[i].highlight_peak}});
    }
    write_text_file(options.out / "manifest.csv", manifest_csv(manifest));
    nlohmann::ordered_json doc;
    doc["tool"] = std::string("skintone ") + SKINTONE_VERSION;
    doc["config_hash"] = config_hash(config);
    doc["seed"] = config.seed;
    doc["images"] = std::move(truth);
    write_text_file(options.out / "ground_truth.json", doc.dump(2) + "\n");
    err << "synth: " << jobs.size() << " images for " << options.subjects << " subjects\n";
    return kOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e) == kEmpty ? kUsageOrIo : exit_code_for(e);
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kUsageOrIo;
  }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Skin tone metrics (ITA, RSR, RSR*, SREDS) over landmark-annotated face images"};
  app.name("skintone");
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(SKINTONE_VERSION));

  ComputeOptions compute;
  std::string metric_name;
  std::string manifest, config, fit, fit_out, out_path;
  std::uint64_t seed = 0;
  auto* c = app.add_subcommand("compute", "Compute one metric for every image in a manifest");
  c->add_option("--manifest", manifest, "Manifest CSV")->required();
  c->add_option("--metric", metric_name, "ita, rsr, rsr-star or sreds")
      ->required()
      ->check(CLI::IsMember({"ita", "rsr", "rsr-star", "sreds"}));
  c->add_option("--config", config, "RunConfig JSON");
  c->add_option("--fit", fit, "Load a fit file instead of fitting");
  c->add_option("--fit-out", fit_out, "Fit on this manifest and write the fit file");
  c->add_option("--out", out_path, "Metrics CSV (default stdout)");
  c->add_option("--jobs", compute.jobs, "Worker threads")->check(CLI::Range(1, 1024));
  auto* c_seed = c->add_option("--seed", seed, "Overrides the config seed");

  EvalOptions eval;
  std::vector<std::string> eval_inputs;
  std::string eval_manifest, eval_out, eval_config;
  auto* e = app.add_subcommand("eval", "Normalize metrics and summarize intra-subject variability");
  e->add_option("metrics", eval_inputs, "Metrics CSV files")->required();
  e->add_option("--manifest", eval_manifest, "Manifest CSV")->required();
  e->add_option("--out", eval_out, "Output directory")->required();
  e->add_option("--config", eval_config, "RunConfig JSON (unused beyond validation)");
  e->add_option("--bins", eval.bins, "Histogram bins")->check(CLI::Range(1, 10000));
  e->add_flag("--plots", eval.plots, "Also write SVG histograms");
  e->add_flag("--force", eval.force, "Merge files with different config hashes");

  SynthOptions synth;
  std::string synth_out, synth_config;
  std::uint64_t synth_seed = 0;
  int images_per_subject = 0;
  auto* s = app.add_subcommand("synth", "Write a synthetic dataset (images, landmarks, manifest)");
  s->add_option("--out", synth_out, "Output directory")->required();
  s->add_option("--config", synth_config, "RunConfig JSON");
  s->add_option("--subjects", synth.subjects, "Number of subjects")->check(CLI::Range(1, 100000));
  s->add_option("--angles", synth.angles, "Incidence angles in degrees")->delimiter(',');
  auto* s_ips = s->add_option("--images-per-subject", images_per_subject,
                              "Angles evenly spaced over [-45, 45]");
  auto* s_seed = s->add_option("--seed", synth_seed, "Overrides the config seed");
  s->add_option("--jobs", synth.jobs, "Worker threads")->check(CLI::Range(1, 1024));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& ex) {
    const int rc = app.exit(ex, out, err);
    return rc == 0 ? kOk : kUsageOrIo;
  }

  if (c->parsed()) {
    compute.manifest = manifest;
    compute.metric = *parse_metric(metric_name);
    if (!config.empty()) compute.config = config;
    if (!fit.empty()) compute.fit = fit;
    if (!fit_out.empty()) compute.fit_out = fit_out;
    compute.out = out_path;
    if (c_seed->count() > 0) compute.seed = seed;
    return cmd_compute(compute, out, err);
  }
  if (e->parsed()) {
    for (const auto& p : eval_inputs) eval.metrics.emplace_back(p);
    eval.manifest = eval_manifest;
    eval.out = eval_out;
    if (!eval_config.empty()) {
      try {
        eval.config = eval_config;
        config_from_json(read_text_file(*eval.config)).validate();
      } catch (const Error& ex) {
        err << "error: " << ex.what() << "\n";
        return kUsageOrIo;
      }
    }
    return cmd_eval(eval, err);
  }
  synth.out = synth_out;
  if (!synth_config.empty()) synth.config = synth_config;
  if (s_ips->count() > 0) synth.images_per_subject = images_per_subject;
  if (s_seed->count() > 0) synth.seed = synth_seed;
  return cmd_synth(synth, err);
}

}  // namespace skintone::cli
