#pragma once

// Dataset manifests and metric CSV files.
//
// Manifest: header image_path,subject_id,landmarks_path,label; paths are
// relative to the manifest's directory.
// Metrics:  "# skintone <version> config=<hash>" comment line, then header
// image_id,subject_id,metric,value,flags,fit_id. Flags are ';'-separated.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "skintone/metric.hpp"

namespace skintone {

/// RFC 4180 style: quoted fields may contain commas, quotes ("") and
/// newlines. Lines starting with '#' outside quotes are skipped.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

std::string csv_field(std::string_view value);

struct ManifestRow {
  std::string image_path;  // as written; doubles as the image id
  std::string subject_id;
  std::string landmarks_path;
  std::optional<std::string> label;
};

struct Manifest {
  std::string dataset_id;
  std::filesystem::path root;  // directory the relative paths resolve against
  std::vector<ManifestRow> rows;

  std::filesystem::path resolve(const std::string& relative) const { return root / relative; }
};

/// Throws Error(kParse) with the offending line number.
Manifest parse_manifest(std::string_view text, const std::filesystem::path& root = {},
                        std::string dataset_id = {});
Manifest load_manifest(const std::filesystem::path& path);
std::string manifest_csv(const Manifest& manifest);

struct MetricsFile {
  std::string version;
  std::string config_hash;
  std::vector<MetricRecord> records;
};

std::string metrics_csv(const std::vector<MetricRecord>& records, const std::string& config_hash);
MetricsFile parse_metrics_csv(std::string_view text);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace skintone
