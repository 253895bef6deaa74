#pragma once

// Run configuration for the actconv tool: defaults, a flat key = value file
// format with [section] headers, and validation.

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "actconv/approximant.hpp"
#include "actconv/error.hpp"
#include "actconv/operators.hpp"
#include "actconv/test_function.hpp"

namespace actconv::cli {

struct RunConfig {
  std::vector<std::string> functions{"sin", "cos", "abs", "gauss"};
  std::vector<OperatorKind> kinds{OperatorKind::Basic, OperatorKind::Kantorovich,
                                  OperatorKind::Quadrature};
  std::vector<int> ns{9, 16, 25, 36, 49};
  double alpha = 0.5;
  double q = 1.0;
  double beta = 1.0;
  std::vector<double> weights = uniform_weights(4);
  Interval domain{-3.0, 3.0};
  int grid_points = 2001;
  std::string output_dir = "actconv-out";
  std::set<std::string> formats{"csv", "json", "svg"};
  double quad_tol = 1e-10;
  int nodes = 129;
  int taylor_order = 2;
  int iterations = 3;
  std::vector<int> chain;
  /// True once functions were chosen explicitly (file or flag).
  bool functions_set = false;

  [[nodiscard]] QuadratureConfig quadrature() const {
    QuadratureConfig c;
    c.abs_tol = quad_tol;
    c.rel_tol = quad_tol;
    return c;
  }

  [[nodiscard]] KernelParams params() const { return KernelParams(q, beta); }

  /// Operator of the given kind at the first configured n (sweeps rescale it).
  [[nodiscard]] OperatorSpec prototype(OperatorKind kind) const {
    const int n0 = ns.empty() ? 1 : ns.front();
    switch (kind) {
      case OperatorKind::Basic: return OperatorSpec::basic(n0, params(), alpha, quadrature());
      case OperatorKind::Kantorovich:
        return OperatorSpec::kantorovich(n0, params(), alpha, quadrature());
      case OperatorKind::Quadrature:
        return OperatorSpec::quadrature_type(weights, n0, params(), alpha, quadrature());
    }
    throw PreconditionError("unknown operator kind");
  }

  [[nodiscard]] bool wants(const std::string& format) const { return formats.count(format) > 0; }
};

/// Throws PreconditionError naming the offending field.
inline void validate(const RunConfig& c) {
  if (c.functions.empty()) throw PreconditionError("config: no functions selected");
  for (const auto& name : c.functions) {
    if (!catalog::by_name(name)) throw PreconditionError("config: unknown function '" + name + "'");
  }
  if (c.kinds.empty()) throw PreconditionError("config: no operator kinds selected");
  if (c.ns.empty()) throw PreconditionError("config: ns must be nonempty");
  for (int n : c.ns) {
    if (n < 1) throw PreconditionError("config: every n must be >= 1");
  }
  (void)c.params();
  for (auto kind : c.kinds) (void)c.prototype(kind);
  if (!(c.domain.hi > c.domain.lo)) throw PreconditionError("config: domain needs a < b");
  if (c.grid_points < 2) throw PreconditionError("config: grid_points must be >= 2");
  if (!(c.quad_tol > 0.0)) throw PreconditionError("config: quad_tol must be positive");
  if (c.nodes < 8) throw PreconditionError("config: nodes must be >= 8");
  if (c.taylor_order < 1) throw PreconditionError("config: taylor_order must be >= 1");
  if (c.iterations < 1) throw PreconditionError("config: iterations must be >= 1");
  for (std::size_t i = 1; i < c.chain.size(); ++i) {
    if (c.chain[i] < c.chain[i - 1]) throw PreconditionError("config: chain must be non-decreasing");
  }
  for (const auto& f : c.formats) {
    if (f != "csv" && f != "json" && f != "svg") {
      throw PreconditionError("config: unknown format '" + f + "'");
    }
  }
  if (c.output_dir.empty()) throw PreconditionError("config: empty output directory");
}

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

inline double to_double(const std::string& key, const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty()) {
    throw PreconditionError("config: '" + key + "' expects a number, got '" + s + "'");
  }
  return v;
}

inline int to_int(const std::string& key, const std::string& s) {
  const double v = to_double(key, s);
  if (v != static_cast<double>(static_cast<int>(v))) {
    throw PreconditionError("config: '" + key + "' expects an integer, got '" + s + "'");
  }
  return static_cast<int>(v);
}

inline std::vector<double> to_doubles(const std::string& key, const std::string& s) {
  std::vector<double> out;
  for (const auto& item : split_list(s)) out.push_back(to_double(key, item));
  return out;
}

inline std::vector<int> to_ints(const std::string& key, const std::string& s) {
  std::vector<int> out;
  for (const auto& item : split_list(s)) out.push_back(to_int(key, item));
  return out;
}

inline Interval to_interval(const std::string& key, const std::string& s) {
  const auto v = to_doubles(key, s);
  if (v.size() != 2) throw PreconditionError("config: '" + key + "' expects a,b");
  return {v[0], v[1]};
}

}  // namespace detail

/// Sets one field from its textual value. Keys match the long flag names
/// with '-' or '_' separators ("grid-points" == "grid_points").
inline void set_field(RunConfig& c, std::string key, const std::string& value) {
  std::replace(key.begin(), key.end(), '-', '_');
  using namespace detail;
  if (key == "q") c.q = to_double(key, value);
  else if (key == "beta") c.beta = to_double(key, value);
  else if (key == "alpha") c.alpha = to_double(key, value);
  else if (key == "n" || key == "ns") c.ns = to_ints(key, value);
  else if (key == "kind" || key == "kinds") {
    c.kinds.clear();
    for (const auto& k : split_list(value)) c.kinds.push_back(parse_operator_kind(k));
  } else if (key == "weights") c.weights = to_doubles(key, value);
  else if (key == "fn" || key == "functions") {
    c.functions = split_list(value);
    c.functions_set = true;
  } else if (key == "domain") c.domain = to_interval(key, value);
  else if (key == "grid_points") c.grid_points = to_int(key, value);
  else if (key == "out" || key == "output_dir") c.output_dir = value;
  else if (key == "format" || key == "formats") {
    const auto f = split_list(value);
    c.formats = std::set<std::string>(f.begin(), f.end());
  } else if (key == "quad_tol") c.quad_tol = to_double(key, value);
  else if (key == "nodes") c.nodes = to_int(key, value);
  else if (key == "taylor_order") c.taylor_order = to_int(key, value);
  else if (key == "iterations") c.iterations = to_int(key, value);
  else if (key == "chain") c.chain = to_ints(key, value);
  else throw PreconditionError("config: unknown key '" + key + "'");
}

/// Parses "key = value" lines. '#' and ';' start comments; "[name]" lines
/// open a section, which only groups keys (they are looked up by name alone).
inline void apply_config_text(RunConfig& c, const std::string& text, const std::string& origin = "config") {
  std::stringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw PreconditionError(origin + ":" + std::to_string(lineno) + ": malformed section header");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw PreconditionError(origin + ":" + std::to_string(lineno) + ": expected key = value");
    }
    try {
      set_field(c, detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
    } catch (const PreconditionError& e) {
      throw PreconditionError(origin + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

inline void apply_config_file(RunConfig& c, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot read config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  apply_config_text(c, buf.str(), path);
}

/// Output directory from ACTCONV_OUT, when set.
inline void apply_environment(RunConfig& c) {
  if (const char* env = std::getenv("ACTCONV_OUT"); env != nullptr && *env != '\0') {
    c.output_dir = env;
  }
}

}  // namespace actconv::cli
