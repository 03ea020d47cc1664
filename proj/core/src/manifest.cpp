#include "skintone/manifest.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "skintone/config.hpp"
#include "skintone/error.hpp"

namespace skintone {

namespace {

constexpr std::string_view kManifestHeader = "image_path,subject_id,landmarks_path,label";
constexpr std::string_view kMetricsHeader = "image_id,subject_id,metric,value,flags,fit_id";

std::string join(const std::vector<std::string>& parts, char sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  if (s.empty()) return out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

}  // namespace

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false, at_line_start = true, skipping = false, field_started = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (skipping) {
      if (c == '\n') {
        skipping = false;
        at_line_start = true;
      }
      continue;
    }
    if (at_line_start && !in_quotes && c == '#') {
      skipping = true;
      continue;
    }
    at_line_start = false;
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        row.push_back(std::move(field));
        field.clear();
        field_started = true;
        break;
      case '\r':
        break;
      case '\n':
        if (field_started || !field.empty() || !row.empty()) {
          row.push_back(std::move(field));
          rows.push_back(std::move(row));
        }
        row.clear();
        field.clear();
        field_started = false;
        at_line_start = true;
        break;
      default:
        field += c;
        field_started = true;
    }
  }
  if (in_quotes) throw Error(ErrorCode::kParse, "CSV: unterminated quoted field");
  if (field_started || !field.empty() || !row.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string csv_field(std::string_view value) {
  if (value.find_first_of(",\"\n\r") == std::string_view::npos &&
      (value.empty() || value.front() != '#')) {
    return std::string(value);
  }
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

Manifest parse_manifest(std::string_view text, const std::filesystem::path& root,
                        std::string dataset_id) {
  const auto rows = parse_csv(text);
  if (rows.empty() || join(rows[0], ',') != kManifestHeader) {
    throw Error(ErrorCode::kParse,
                "manifest: line 1: expected header '" + std::string(kManifestHeader) + "'");
  }
  Manifest m;
  m.root = root;
  m.dataset_id = std::move(dataset_id);
  std::set<std::string> seen;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    const std::string where = "manifest: row " + std::to_string(i + 1) + ": ";
    if (r.size() != 4) {
      throw Error(ErrorCode::kParse, where + "expected 4 fields, got " + std::to_string(r.size()));
    }
    if (r[0].empty()) throw Error(ErrorCode::kParse, where + "empty image_path");
    if (r[1].empty()) throw Error(ErrorCode::kParse, where + "empty subject_id");
    if (!seen.insert(r[0]).second) {
      throw Error(ErrorCode::kParse, where + "duplicate image_path '" + r[0] + "'");
    }
    ManifestRow row{r[0], r[1], r[2], std::nullopt};
    if (!r[3].empty()) row.label = r[3];
    m.rows.push_back(std::move(row));
  }
  return m;
}

Manifest load_manifest(const std::filesystem::path& path) {
  return parse_manifest(read_text_file(path), path.parent_path(), path.stem().string());
}

std::string manifest_csv(const Manifest& manifest) {
  std::string out = std::string(kManifestHeader) + "\n";
  for (const auto& r : manifest.rows) {
    out += csv_field(r.image_path) + "," + csv_field(r.subject_id) + "," +
           csv_field(r.landmarks_path) + "," + csv_field(r.label.value_or("")) + "\n";
  }
  return out;
}

std::string metrics_csv(const std::vector<MetricRecord>& records, const std::string& config_hash) {
  std::string out = std::string("# skintone ") + SKINTONE_VERSION + " config=" + config_hash + "\n";
  out += std::string(kMetricsHeader) + "\n";
  for (const auto& r : records) {
    out += csv_field(r.image_id) + "," + csv_field(r.subject_id) + "," + to_string(r.metric) +
           "," + format_double(r.value) + "," + csv_field(join(r.flags, ';')) + "," +
           csv_field(r.fit_id) + "\n";
  }
  return out;
}

MetricsFile parse_metrics_csv(std::string_view text) {
  MetricsFile f;
  // The provenance comment is the first line.
  const std::string_view first = text.substr(0, text.find('\n'));
  std::istringstream head{std::string(first)};
  std::string pound, tool, hash;
  if (head >> pound >> tool >> f.version >> hash && first.starts_with("# skintone ") &&
      hash.starts_with("config=")) {
    f.config_hash = hash.substr(7);
  } else {
    throw Error(ErrorCode::kParse, "metrics: line 1: missing '# skintone <version> config=<hash>'");
  }
  const auto rows = parse_csv(text);
  if (rows.empty() || join(rows[0], ',') != kMetricsHeader) {
    throw Error(ErrorCode::kParse,
                "metrics: expected header '" + std::string(kMetricsHeader) + "'");
  }
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    const std::string where = "metrics: row " + std::to_string(i + 1) + ": ";
    if (r.size() != 6) {
      throw Error(ErrorCode::kParse, where + "expected 6 fields, got " + std::to_string(r.size()));
    }
    MetricRecord rec;
    rec.image_id = r[0];
    rec.subject_id = r[1];
    const auto metric = parse_metric(r[2]);
    if (!metric) throw Error(ErrorCode::kParse, where + "unknown metric '" + r[2] + "'");
    rec.metric = *metric;
    try {
      std::size_t used = 0;
      rec.value = std::stod(r[3], &used);
      if (used != r[3].size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw Error(ErrorCode::kParse, where + "bad value '" + r[3] + "'");
    }
    rec.flags = split(r[4], ';');
    rec.fit_id = r[5];
    f.records.push_back(std::move(rec));
  }
  return f;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path.string());
}

}  // namespace skintone
