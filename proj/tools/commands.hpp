#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "skintone/metric.hpp"

namespace skintone::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kUsageOrIo = 2;
inline constexpr int kEmpty = 3;

struct ComputeOptions {
  std::filesystem::path manifest;
  Metric metric = Metric::kIta;
  std::optional<std::filesystem::path> config;
  std::optional<std::filesystem::path> fit;
  std::optional<std::filesystem::path> fit_out;
  std::filesystem::path out;  // empty: stdout
  int jobs = 1;
  std::optional<std::uint64_t> seed;
};

struct EvalOptions {
  std::vector<std::filesystem::path> metrics;
  std::filesystem::path manifest;
  std::filesystem::path out;  // directory
  std::optional<std::filesystem::path> config;
  int bins = 20;
  bool plots = false;
  bool force = false;
};

struct SynthOptions {
  std::filesystem::path out;  // directory
  std::optional<std::filesystem::path> config;
  int subjects = 5;
  std::vector<double> angles;  // empty: -45..45 step 15
  std::optional<int> images_per_subject;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
};

int cmd_compute(const ComputeOptions& options, std::ostream& out, std::ostream& err);
int cmd_eval(const EvalOptions& options, std::ostream& err);
int cmd_synth(const SynthOptions& options, std::ostream& err);

/// Parses argv and dispatches; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace skintone::cli
