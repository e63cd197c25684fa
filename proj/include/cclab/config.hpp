#pragma once

#include <array>
#include <charconv>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cclab/errors.hpp"

namespace cclab {

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("cannot parse number '" + s + "' for " + what);
  }
}

inline std::int64_t parse_int(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    long long v = std::stoll(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("cannot parse integer '" + s + "' for " + what);
  }
}

inline std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

}  // namespace detail

// Flat sectioned key-value experiment configuration. Sections: [base],
// [cocycle], [rates], [run], [output]. Unrecognized [cocycle] keys are
// kind-specific parameters; unrecognized keys elsewhere are errors. The
// structure round-trips losslessly through serialize/parse.
struct ExperimentConfig {
  // [base]
  std::array<std::int64_t, 4> base_matrix{2, 1, 1, 1};
  double gamma_exponent = 0.4;
  // [cocycle]
  std::string cocycle_kind = "triangular";
  int dim = 2;
  std::map<std::string, std::string> cocycle_params;
  // [rates] constant overrides
  std::map<std::string, double> rate_overrides;
  // [run]
  std::uint64_t seed = 1;
  double tol = 1e-10;
  int n_max = 200;
  int grid_n = 32;
  int samples = 100;
  int threads = 1;
  double max_leg = 3.0;
  double beta = 1.0;
  int n_cycles = 50;
  // [output]
  std::string out_dir = "out";
  std::string format = "json";
};

inline ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg;
  cfg.cocycle_params.clear();
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("malformed section at line " + std::to_string(lineno));
      section = detail::trim(line.substr(1, line.size() - 2));
      if (section != "base" && section != "cocycle" && section != "rates" &&
          section != "run" && section != "output")
        throw ConfigError("unknown section [" + section + "]");
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("expected key = value at line " + std::to_string(lineno));
    std::string key = detail::trim(line.substr(0, eq));
    std::string value = detail::trim(line.substr(eq + 1));
    if (section == "base") {
      if (key == "matrix") {
        auto toks = detail::split_ws(value);
        if (toks.size() != 4) throw ConfigError("base.matrix needs 4 integers");
        for (int i = 0; i < 4; ++i)
          cfg.base_matrix[static_cast<std::size_t>(i)] = detail::parse_int(toks[static_cast<std::size_t>(i)], "base.matrix");
      } else if (key == "gamma_exponent") {
        cfg.gamma_exponent = detail::parse_double(value, "base.gamma_exponent");
      } else {
        throw ConfigError("unknown key base." + key);
      }
    } else if (section == "cocycle") {
      if (key == "kind")
        cfg.cocycle_kind = value;
      else if (key == "dim")
        cfg.dim = static_cast<int>(detail::parse_int(value, "cocycle.dim"));
      else
        cfg.cocycle_params[key] = value;
    } else if (section == "rates") {
      if (key != "nu" && key != "nu_hat" && key != "gamma" && key != "gamma_hat" &&
          key != "mu" && key != "mu_hat")
        throw ConfigError("unknown key rates." + key);
      cfg.rate_overrides[key] = detail::parse_double(value, "rates." + key);
    } else if (section == "run") {
      if (key == "seed")
        cfg.seed = static_cast<std::uint64_t>(detail::parse_int(value, "run.seed"));
      else if (key == "tol")
        cfg.tol = detail::parse_double(value, "run.tol");
      else if (key == "n_max")
        cfg.n_max = static_cast<int>(detail::parse_int(value, "run.n_max"));
      else if (key == "grid")
        cfg.grid_n = static_cast<int>(detail::parse_int(value, "run.grid"));
      else if (key == "samples")
        cfg.samples = static_cast<int>(detail::parse_int(value, "run.samples"));
      else if (key == "threads")
        cfg.threads = static_cast<int>(detail::parse_int(value, "run.threads"));
      else if (key == "max_leg")
        cfg.max_leg = detail::parse_double(value, "run.max_leg");
      else if (key == "beta")
        cfg.beta = detail::parse_double(value, "run.beta");
      else if (key == "n_cycles")
        cfg.n_cycles = static_cast<int>(detail::parse_int(value, "run.n_cycles"));
      else
        throw ConfigError("unknown key run." + key);
    } else if (section == "output") {
      if (key == "dir")
        cfg.out_dir = value;
      else if (key == "format")
        cfg.format = value;
      else
        throw ConfigError("unknown key output." + key);
    } else {
      throw ConfigError("key outside any section at line " + std::to_string(lineno));
    }
  }
  if (cfg.format != "json" && cfg.format != "csv")
    throw ConfigError("output.format must be json or csv");
  if (cfg.dim < 1 || cfg.dim > 4) throw ConfigError("cocycle.dim must lie in 1..4");
  return cfg;
}

inline std::string serialize_config(const ExperimentConfig& c) {
  std::ostringstream out;
  out << "[base]\n";
  out << "matrix = " << c.base_matrix[0] << ' ' << c.base_matrix[1] << ' ' << c.base_matrix[2]
      << ' ' << c.base_matrix[3] << "\n";
  out << "gamma_exponent = " << detail::format_double(c.gamma_exponent) << "\n";
  out << "\n[cocycle]\n";
  out << "kind = " << c.cocycle_kind << "\n";
  out << "dim = " << c.dim << "\n";
  for (const auto& [k, v] : c.cocycle_params) out << k << " = " << v << "\n";
  out << "\n[rates]\n";
  for (const auto& [k, v] : c.rate_overrides) out << k << " = " << detail::format_double(v) << "\n";
  out << "\n[run]\n";
  out << "seed = " << c.seed << "\n";
  out << "tol = " << detail::format_double(c.tol) << "\n";
  out << "n_max = " << c.n_max << "\n";
  out << "grid = " << c.grid_n << "\n";
  out << "samples = " << c.samples << "\n";
  out << "threads = " << c.threads << "\n";
  out << "max_leg = " << detail::format_double(c.max_leg) << "\n";
  out << "beta = " << detail::format_double(c.beta) << "\n";
  out << "n_cycles = " << c.n_cycles << "\n";
  out << "\n[output]\n";
  out << "dir = " << c.out_dir << "\n";
  out << "format = " << c.format << "\n";
  return out.str();
}

// FNV-1a over the canonical serialization; stable digest for reports.
inline std::string config_digest(const ExperimentConfig& c) {
  std::string s = serialize_config(c);
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  static const char* hex = "0123456789abcdef";
  for (int i = 15; i >= 0; --i) {
    buf[i] = hex[h & 0xf];
    h >>= 4;
  }
  buf[16] = '\0';
  return std::string(buf);
}

}  // namespace cclab
