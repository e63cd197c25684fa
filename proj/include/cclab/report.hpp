#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cclab/errors.hpp"

namespace cclab {

// Machine-readable experiment result. Summary keys are sorted; the JSON
// object keeps the fixed field order experiment, config_digest, error,
// summary, samples, seed, tolerances, so identical runs serialize
// byte-identically.
struct Report {
  std::string experiment;
  std::string config_digest;
  std::optional<std::string> error;    // typed error name, when a run failed
  std::map<std::string, double> summary;
  std::optional<std::string> samples;  // CSV table file name, when written
  std::uint64_t seed = 0;
  std::map<std::string, double> tolerances;
};

struct SampleTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

inline std::string csv_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline void write_report_json(const Report& r, const std::string& path) {
  nlohmann::ordered_json j;
  j["experiment"] = r.experiment;
  j["config_digest"] = r.config_digest;
  if (r.error)
    j["error"] = *r.error;
  else
    j["error"] = nullptr;
  nlohmann::ordered_json summary = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.summary) summary[k] = v;
  j["summary"] = summary;
  if (r.samples)
    j["samples"] = *r.samples;
  else
    j["samples"] = nullptr;
  j["seed"] = r.seed;
  nlohmann::ordered_json tol = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.tolerances) tol[k] = v;
  j["tolerances"] = tol;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write report file: " + path);
  out << j.dump(2) << "\n";
}

inline void write_sample_csv(const SampleTable& t, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write sample table: " + path);
  for (std::size_t i = 0; i < t.header.size(); ++i)
    out << t.header[i] << (i + 1 == t.header.size() ? "" : ",");
  out << "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      out << row[i] << (i + 1 == row.size() ? "" : ",");
    out << "\n";
  }
}

}  // namespace cclab
