#pragma once

// The actconv verbs. Each takes a validated RunConfig, writes its artifacts
// under config.output_dir and returns the process exit status: 0 when every
// check whose hypotheses hold passed, 1 otherwise.

#include <algorithm>
#include <filesystem>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "actconv/analysis.hpp"
#include "actconv/bounds.hpp"
#include "actconv/cli/config.hpp"
#include "actconv/cli/emit.hpp"
#include "actconv/kernel.hpp"

namespace actconv::cli {

using json = nlohmann::json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitIo = 3;

namespace detail {

inline json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline json config_json(const RunConfig& c) {
  json kinds = json::array();
  for (auto k : c.kinds) kinds.push_back(std::string(to_string(k)));
  return {{"functions", c.functions}, {"kinds", kinds},       {"ns", c.ns},
          {"alpha", c.alpha},         {"q", c.q},             {"beta", c.beta},
          {"weights", c.weights},     {"domain", {c.domain.lo, c.domain.hi}},
          {"grid_points", c.grid_points}, {"quad_tol", c.quad_tol}, {"nodes", c.nodes},
          {"taylor_order", c.taylor_order}, {"iterations", c.iterations}, {"chain", c.chain}};
}

inline std::filesystem::path out_path(const RunConfig& c, const std::string& name) {
  return std::filesystem::path(c.output_dir) / name;
}

inline std::string stem(const std::string& fn, OperatorKind kind) {
  return fn + "_" + std::string(to_string(kind));
}

inline std::string verdict(bool hypothesis, bool ok) {
  if (!hypothesis) return "hypothesis-not-met";
  return ok ? "true" : "false";
}

inline void write_json(const RunConfig& c, const std::string& name, const json& j) {
  write_file(out_path(c, name), j.dump(2) + "\n");
}

}  // namespace detail

/// Kernel invariants: normalization, symmetry, location and value of the
/// maximum of the activation density, tail mass against its bound for each
/// configured n, and absolute moments k = 1..5 against their bound.
inline int cmd_kernel_check(const RunConfig& c, std::ostream& log) {
  const KernelParams p = c.params();
  const QuadratureConfig quad = c.quadrature();
  struct Row {
    std::string check;
    std::string parameter;
    double value;
    double reference;
    std::string status;
  };
  std::vector<Row> rows;

  const auto mass = kernel_mass(p, quad);
  const double norm_res = std::fabs(mass.value - 1.0);
  rows.push_back({"normalization", "", norm_res, 1e-8, norm_res <= 1e-8 ? "pass" : "fail"});

  double sym = 0.0;
  for (double x : uniform_nodes(2001, 0.0, 40.0)) sym = std::max(sym, std::fabs(psi(p, x) - psi(p, -x)));
  rows.push_back({"symmetry", "", sym, 0.0, sym == 0.0 ? "pass" : "fail"});

  const double x0 = p.g_argmax();
  const double at_max = g(p, x0);
  double max_res = std::fabs(at_max - p.g_max_value());
  for (double x : uniform_nodes(2001, x0 - 5.0, x0 + 5.0)) max_res = std::max(max_res, g(p, x) - at_max);
  const double max_tol = 1e-14 * p.g_max_value();
  rows.push_back({"maximum", "x=" + fmt17(x0), max_res, max_tol, max_res <= max_tol ? "pass" : "fail"});

  for (int n : c.ns) {
    const std::string param = "n=" + std::to_string(n) + ",alpha=" + fmt17(c.alpha);
    if (!rate_hypothesis_met(n, c.alpha)) {
      rows.push_back({"tail", param, NAN, NAN, "hypothesis-not-met"});
      continue;
    }
    const double bound = tail_mass_bound(p, n, c.alpha);
    const auto tail = kernel_tail_mass(p, n, c.alpha, quad);
    rows.push_back({"tail", param, tail.value, bound, tail.value <= bound ? "pass" : "fail"});
  }
  for (int k = 1; k <= 5; ++k) {
    const auto m = kernel_absolute_moment(p, k, quad);
    const double bound = moment_bound(p, k);
    rows.push_back({"moment", "k=" + std::to_string(k), m.value, bound, m.value <= bound ? "pass" : "fail"});
  }

  bool failed = false;
  std::ostringstream csv;
  csv << "check,parameter,value,reference,status\n";
  json jrows = json::array();
  log << std::left << std::setw(14) << "check" << std::setw(22) << "parameter" << std::setw(14) << "value"
      << std::setw(14) << "reference" << "status\n";
  for (const auto& r : rows) {
    failed = failed || r.status == "fail";
    csv << r.check << ',' << r.parameter << ',' << fmt17(r.value) << ',' << fmt17(r.reference) << ','
        << r.status << '\n';
    jrows.push_back({{"check", r.check},
                     {"parameter", r.parameter},
                     {"value", detail::number(r.value)},
                     {"reference", detail::number(r.reference)},
                     {"status", r.status}});
    log << std::setw(14) << r.check << std::setw(22) << r.parameter << std::setw(14) << fmt_short(r.value)
        << std::setw(14) << fmt_short(r.reference) << r.status << '\n';
  }
  if (c.wants("csv")) write_file(detail::out_path(c, "kernel_check.csv"), csv.str());
  if (c.wants("json")) {
    detail::write_json(c, "kernel_check.json",
                       {{"command", "kernel-check"},
                        {"q", c.q},
                        {"beta", c.beta},
                        {"rows", jrows},
                        {"failures", failed ? 1 : 0}});
  }
  return failed ? kExitCheckFailed : kExitOk;
}

/// Sup-error sweeps of every (function, kind) pair against the Jackson-type
/// estimates.
inline int cmd_approx(const RunConfig& c, std::ostream& log) {
  const auto grid = MeasurementGrid::uniform(c.domain.lo, c.domain.hi, c.grid_points);
  json results = json::array();
  std::vector<std::string> failures;
  for (const auto& name : c.functions) {
    const TestFunction f = *catalog::by_name(name);
    for (auto kind : c.kinds) {
      const auto records = run_convergence_sweep(f, c.prototype(kind), c.ns, grid);
      std::ostringstream csv;
      csv << "n,sup_error,bound,satisfied,rate_so_far\n";
      json jrec = json::array();
      std::vector<double> ns_ok, errs_ok;
      PlotSeries err{"sup error", "#1f77b4", false, {}, {}};
      PlotSeries bnd{"bound", "#d62728", true, {}, {}};
      for (const auto& r : records) {
        std::string rate;
        if (r.error.empty()) {
          ns_ok.push_back(r.n);
          errs_ok.push_back(r.measured_sup_error);
          if (ns_ok.size() >= 3) rate = fmt17(fit_rate(ns_ok, errs_ok));
        }
        const std::string sat = r.error.empty() ? detail::verdict(r.hypothesis_met, r.satisfied) : "error";
        csv << r.n << ',' << fmt17(r.measured_sup_error) << ',' << fmt17(r.bound_value) << ',' << sat << ','
            << rate << '\n';
        jrec.push_back({{"n", r.n},
                        {"sup_error", detail::number(r.measured_sup_error)},
                        {"bound", detail::number(r.bound_value)},
                        {"bound_kind", std::string(to_string(r.bound_kind))},
                        {"omega", detail::number(r.omega)},
                        {"omega_source", r.omega_closed_form ? "closed-form" : "grid-diagnostic"},
                        {"hypothesis_met", r.hypothesis_met},
                        {"satisfied", r.satisfied},
                        {"error", r.error}});
        err.x.push_back(r.n);
        err.y.push_back(r.measured_sup_error);
        bnd.x.push_back(r.n);
        bnd.y.push_back(r.bound_value);
        if (r.failed()) {
          failures.push_back(name + "/" + std::string(to_string(kind)) + "/n=" + std::to_string(r.n) +
                             (r.error.empty() ? "" : ": " + r.error));
        }
        log << "approx " << std::left << std::setw(6) << name << std::setw(12) << to_string(kind) << " n="
            << std::setw(4) << r.n << " error=" << std::setw(12) << fmt_short(r.measured_sup_error)
            << " bound=" << std::setw(12) << fmt_short(r.bound_value) << ' ' << sat << " ("
            << fmt_short(r.runtime_ms) << " ms)\n";
      }
      const std::string base = "approx_" + detail::stem(name, kind);
      if (c.wants("csv")) write_file(detail::out_path(c, base + ".csv"), csv.str());
      if (c.wants("svg")) {
        write_file(detail::out_path(c, base + ".svg"),
                   loglog_svg(name + ", " + std::string(to_string(kind)), "n", "sup error", {err, bnd}));
      }
      json rate = nullptr;
      if (ns_ok.size() >= 3) rate = detail::number(fit_rate(ns_ok, errs_ok));
      results.push_back({{"function", name},
                         {"kind", std::string(to_string(kind))},
                         {"records", jrec},
                         {"fitted_rate", rate},
                         {"guaranteed_order", c.alpha}});
    }
  }
  if (c.wants("json")) {
    detail::write_json(c, "approx_summary.json",
                       {{"command", "approx"},
                        {"config", detail::config_json(c)},
                        {"results", results},
                        {"failures", failures}});
  }
  for (const auto& f : failures) log << "FAILED: " << f << '\n';
  return failures.empty() ? kExitOk : kExitCheckFailed;
}

/// Taylor-corrected residuals against the higher-order estimates.
inline int cmd_taylor(const RunConfig& c, std::ostream& log) {
  const int N = c.taylor_order;
  const auto grid = MeasurementGrid::uniform(c.domain.lo, c.domain.hi, c.grid_points);
  json results = json::array();
  json skipped = json::array();
  std::vector<std::string> failures;
  for (const auto& name : c.functions) {
    const TestFunction f = *catalog::by_name(name);
    if (f.derivative_count() < N || !f.derivative(N).has_modulus() || !f.derivative(N).bounded()) {
      log << "taylor: skipping '" << name << "' (needs " << N << " derivatives with known modulus)\n";
      skipped.push_back(name);
      continue;
    }
    for (auto kind : c.kinds) {
      const OperatorSpec proto = c.prototype(kind);
      std::ostringstream csv;
      csv << "n,residual,bound,satisfied";
      for (int k = 1; k <= N; ++k) csv << ",moment_" << k;
      csv << '\n';
      json jrec = json::array();
      PlotSeries res{"corrected residual", "#1f77b4", false, {}, {}};
      PlotSeries bnd{"bound", "#d62728", true, {}, {}};
      for (int n : c.ns) {
        const std::string tag = name + "/" + std::string(to_string(kind)) + "/n=" + std::to_string(n);
        if (!rate_hypothesis_met(n, c.alpha)) {
          csv << n << ",nan,nan,hypothesis-not-met";
          for (int k = 1; k <= N; ++k) csv << ",nan";
          csv << '\n';
          jrec.push_back({{"n", n}, {"hypothesis_met", false}});
          log << "taylor " << tag << " hypothesis not met\n";
          continue;
        }
        try {
          const auto r = measure_taylor_residual(f, proto.with_n(n), N, grid);
          csv << n << ',' << fmt17(r.residual) << ',' << fmt17(r.bound_value) << ','
              << (r.satisfied ? "true" : "false");
          for (double m : r.central_moments) csv << ',' << fmt17(m);
          csv << '\n';
          jrec.push_back({{"n", n},
                          {"residual", detail::number(r.residual)},
                          {"bound", detail::number(r.bound_value)},
                          {"central_moments", r.central_moments},
                          {"hypothesis_met", true},
                          {"satisfied", r.satisfied}});
          res.x.push_back(n);
          res.y.push_back(r.residual);
          bnd.x.push_back(n);
          bnd.y.push_back(r.bound_value);
          if (!r.satisfied) failures.push_back(tag);
          log << "taylor " << std::left << std::setw(28) << tag << " residual=" << std::setw(12)
              << fmt_short(r.residual) << " bound=" << fmt_short(r.bound_value) << '\n';
        } catch (const std::exception& e) {
          failures.push_back(tag + ": " + e.what());
          csv << n << ",nan,nan,error";
          for (int k = 1; k <= N; ++k) csv << ",nan";
          csv << '\n';
          jrec.push_back({{"n", n}, {"error", e.what()}});
        }
      }
      const std::string base = "taylor_" + detail::stem(name, kind);
      if (c.wants("csv")) write_file(detail::out_path(c, base + ".csv"), csv.str());
      if (c.wants("svg")) {
        write_file(detail::out_path(c, base + ".svg"),
                   loglog_svg(name + ", " + std::string(to_string(kind)) + ", N=" + std::to_string(N), "n",
                              "corrected residual", {res, bnd}));
      }
      results.push_back({{"function", name}, {"kind", std::string(to_string(kind))}, {"records", jrec}});
    }
  }
  if (c.wants("json")) {
    detail::write_json(c, "taylor_summary.json",
                       {{"command", "taylor"},
                        {"order", N},
                        {"config", detail::config_json(c)},
                        {"results", results},
                        {"skipped", skipped},
                        {"failures", failures}});
  }
  for (const auto& f : failures) log << "FAILED: " << f << '\n';
  return failures.empty() ? kExitOk : kExitCheckFailed;
}

/// Iterated operators: r-fold composition for each configured n, or a
/// single mixed chain when `chain` is set.
inline int cmd_iterate(const RunConfig& c, std::ostream& log) {
  const auto grid = MeasurementGrid::uniform(c.domain.lo, c.domain.hi, c.grid_points);
  const std::vector<std::string> functions =
      c.functions_set ? c.functions : std::vector<std::string>{"sin", "cos", "gauss"};
  std::vector<std::vector<int>> chains;
  if (!c.chain.empty()) {
    chains.push_back(c.chain);
  } else {
    for (int n : c.ns) chains.emplace_back(static_cast<std::size_t>(c.iterations), n);
  }

  json results = json::array();
  std::vector<std::string> failures;
  const ApproximantOptions opts{};
  for (const auto& name : functions) {
    const TestFunction f = *catalog::by_name(name);
    for (auto kind : c.kinds) {
      const OperatorSpec proto = c.prototype(kind);
      std::ostringstream csv;
      csv << "stages,r,chain_error,single_error_sum,bound_sum,bound_coarse,interpolation_residual,slack,"
             "satisfied_measured,satisfied_bound\n";
      json jrec = json::array();
      PlotSeries err{"chain error", "#1f77b4", false, {}, {}};
      PlotSeries bnd{"summed bound", "#d62728", true, {}, {}};
      for (const auto& ns : chains) {
        std::string stages;
        for (std::size_t i = 0; i < ns.size(); ++i) stages += (i ? ";" : "") + std::to_string(ns[i]);
        const std::string tag = name + "/" + std::string(to_string(kind)) + "/[" + stages + "]";
        try {
          const auto r = measure_chain(f, proto, ns, grid, c.nodes, opts);
          const bool hyp = std::isfinite(r.bound_sum);
          csv << stages << ',' << ns.size() << ',' << fmt17(r.chain_error) << ',' << fmt17(r.single_error_sum)
              << ',' << fmt17(r.bound_sum) << ',' << fmt17(r.bound_coarse) << ','
              << fmt17(r.interpolation_residual) << ',' << fmt17(r.slack) << ','
              << (r.satisfied_measured ? "true" : "false") << ',' << detail::verdict(hyp, r.satisfied_bound)
              << '\n';
          jrec.push_back({{"stages", ns},
                          {"chain_error", detail::number(r.chain_error)},
                          {"single_error_sum", detail::number(r.single_error_sum)},
                          {"bound_sum", detail::number(r.bound_sum)},
                          {"bound_coarse", detail::number(r.bound_coarse)},
                          {"interpolation_residual", detail::number(r.interpolation_residual)},
                          {"slack", detail::number(r.slack)},
                          {"satisfied_measured", r.satisfied_measured},
                          {"hypothesis_met", hyp},
                          {"satisfied_bound", r.satisfied_bound}});
          err.x.push_back(ns.front());
          err.y.push_back(r.chain_error);
          bnd.x.push_back(ns.front());
          bnd.y.push_back(r.bound_sum);
          if (!r.satisfied_measured || (hyp && !r.satisfied_bound)) failures.push_back(tag);
          log << "iterate " << std::left << std::setw(34) << tag << " error=" << std::setw(12)
              << fmt_short(r.chain_error) << " sum-bound=" << std::setw(12) << fmt_short(r.bound_sum)
              << " coarse=" << std::setw(12) << fmt_short(r.bound_coarse)
              << " slack=" << fmt_short(r.slack) << '\n';
        } catch (const std::exception& e) {
          failures.push_back(tag + ": " + e.what());
          csv << stages << ',' << ns.size() << ",nan,nan,nan,nan,nan,nan,error,error\n";
          jrec.push_back({{"stages", ns}, {"error", e.what()}});
        }
      }
      const std::string base = "iterate_" + detail::stem(name, kind);
      if (c.wants("csv")) write_file(detail::out_path(c, base + ".csv"), csv.str());
      if (c.wants("svg")) {
        write_file(detail::out_path(c, base + ".svg"),
                   loglog_svg(name + ", " + std::string(to_string(kind)) + ", iterated", "first-stage n",
                              "sup error", {err, bnd}));
      }
      results.push_back({{"function", name}, {"kind", std::string(to_string(kind))}, {"records", jrec}});
    }
  }
  if (c.wants("json")) {
    detail::write_json(c, "iterate_summary.json",
                       {{"command", "iterate"},
                        {"config", detail::config_json(c)},
                        {"results", results},
                        {"failures", failures}});
  }
  for (const auto& f : failures) log << "FAILED: " << f << '\n';
  return failures.empty() ? kExitOk : kExitCheckFailed;
}

/// Collects the JSON summaries found in the output directory into
/// report_index.json (and report_index.csv).
inline int cmd_report(const RunConfig& c, std::ostream& log) {
  namespace fs = std::filesystem;
  const fs::path dir(c.output_dir);
  if (!fs::is_directory(dir)) throw OutputError("output directory '" + dir.string() + "' does not exist");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto fname = entry.path().filename().string();
    if (entry.is_regular_file() && entry.path().extension() == ".json" && fname != "report_index.json") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());

  json entries = json::array();
  std::ostringstream csv;
  csv << "file,command,results,failures\n";
  std::size_t total_failures = 0;
  for (const auto& path : files) {
    std::ifstream in(path);
    json j;
    try {
      in >> j;
    } catch (const std::exception& e) {
      throw OutputError("cannot parse '" + path.string() + "': " + e.what());
    }
    if (!j.is_object() || !j.contains("command")) continue;
    std::size_t failures = 0;
    if (j.contains("failures")) {
      failures = j["failures"].is_array() ? j["failures"].size() : j["failures"].get<std::size_t>();
    }
    std::size_t count = 0;
    if (j.contains("results")) count = j["results"].size();
    if (j.contains("rows")) count = j["rows"].size();
    total_failures += failures;
    const std::string command = j["command"].get<std::string>();
    entries.push_back({{"file", path.filename().string()},
                       {"command", command},
                       {"results", count},
                       {"failures", failures}});
    csv << path.filename().string() << ',' << command << ',' << count << ',' << failures << '\n';
    log << "report " << path.filename().string() << ": " << count << " results, " << failures << " failures\n";
  }
  if (c.wants("json")) {
    detail::write_json(c, "report_index.json", {{"summaries", entries}, {"total_failures", total_failures}});
  }
  if (c.wants("csv")) write_file(detail::out_path(c, "report_index.csv"), csv.str());
  return total_failures == 0 ? kExitOk : kExitCheckFailed;
}

}  // namespace actconv::cli
