#pragma once

// Measurement layer: moduli of continuity and sup norms on grids, error
// sweeps against the theoretical estimates, smoothness preservation and
// empirical rates.

#include <chrono>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "actconv/approximant.hpp"
#include "actconv/bounds.hpp"
#include "actconv/error.hpp"
#include "actconv/operators.hpp"
#include "actconv/parallel.hpp"

namespace actconv {

/// Numerical kernel functionals, used by kernel-check and the test suites.
struct KernelFunctional {
  double value = 0.0;
  double error_estimate = 0.0;
};

namespace detail {
inline KernelFunctional checked(const IntegralResult& r, const std::string& what) {
  if (!r.converged) throw ConvergenceError(what + ": quadrature did not converge");
  return {r.value, r.error_estimate};
}
}  // namespace detail

/// int Psi over the real line.
[[nodiscard]] inline KernelFunctional kernel_mass(const KernelParams& p, const QuadratureConfig& cfg = {}) {
  const auto f = [&](double h) { return psi_unchecked(p, h); };
  return detail::checked(integrate_real_line(f, RealLineDecay{p}, cfg), "kernel_mass");
}

/// Kernel mass on |h| >= n^{1-alpha}, by symmetry twice the right tail.
[[nodiscard]] inline KernelFunctional kernel_tail_mass(const KernelParams& p, int n, double alpha,
                                                       const QuadratureConfig& cfg = {}) {
  if (n < 1) throw PreconditionError("kernel_tail_mass: n must be >= 1");
  const double t = std::pow(static_cast<double>(n), 1.0 - alpha);
  const double radius = std::max(t, truncation_radius(p, cfg.truncation_eps / 2.0));
  const auto f = [&](double h) { return psi_unchecked(p, h); };
  const auto r = detail::checked(integrate_interval(f, t, radius, cfg), "kernel_tail_mass");
  return {2.0 * r.value, 2.0 * r.error_estimate + cfg.truncation_eps};
}

/// int |h|^k Psi(h) dh.
[[nodiscard]] inline KernelFunctional kernel_absolute_moment(const KernelParams& p, int k,
                                                             const QuadratureConfig& cfg = {}) {
  if (k < 1) throw PreconditionError("kernel_absolute_moment: k must be >= 1");
  double radius = truncation_radius(p, cfg.truncation_eps);
  while (detail::polynomial_tail_bound(p, 1, k, radius) > cfg.truncation_eps) radius += 1.0;
  const auto f = [&](double h) { return std::pow(h, k) * psi_unchecked(p, h); };
  const auto r = detail::checked(integrate_interval(f, 0.0, radius, cfg), "kernel_absolute_moment");
  return {2.0 * r.value, 2.0 * r.error_estimate + cfg.truncation_eps};
}

class MeasurementGrid {
 public:
  MeasurementGrid(Interval domain, std::vector<double> points)
      : domain_(domain), points_(std::move(points)) {
    if (points_.size() < 2) throw PreconditionError("MeasurementGrid: need at least 2 points");
    for (std::size_t i = 0; i < points_.size(); ++i) {
      if (points_[i] < domain_.lo || points_[i] > domain_.hi) {
        throw PreconditionError("MeasurementGrid: point outside domain");
      }
      if (i > 0 && !(points_[i] > points_[i - 1])) {
        throw PreconditionError("MeasurementGrid: points must be strictly increasing");
      }
    }
  }

  static MeasurementGrid uniform(double a, double b, int count = 2001) {
    if (!(b > a)) throw PreconditionError("MeasurementGrid: need b > a");
    if (count < 2) throw PreconditionError("MeasurementGrid: need at least 2 points");
    return MeasurementGrid({a, b}, uniform_nodes(count, a, b));
  }

  [[nodiscard]] Interval domain() const noexcept { return domain_; }
  [[nodiscard]] const std::vector<double>& points() const noexcept { return points_; }
  [[nodiscard]] std::size_t size() const noexcept { return points_.size(); }

  /// Largest gap between neighbouring points.
  [[nodiscard]] double spacing() const noexcept {
    double s = 0.0;
    for (std::size_t i = 1; i < points_.size(); ++i) s = std::max(s, points_[i] - points_[i - 1]);
    return s;
  }

  template <class F>
  [[nodiscard]] std::vector<double> sample(const F& f) const {
    std::vector<double> v(points_.size());
    parallel_for(points_.size(), [&](std::size_t i) { v[i] = f(points_[i]); });
    return v;
  }

 private:
  Interval domain_;
  std::vector<double> points_;
};

/// max |v_i - v_j| over grid pairs with |x_i - x_j| <= theta, i.e. the
/// largest range inside any window of width theta (sliding min/max).
[[nodiscard]] inline double grid_modulus(std::span<const double> points,
                                         std::span<const double> values, double theta) {
  if (points.size() != values.size()) throw PreconditionError("grid_modulus: size mismatch");
  std::deque<std::size_t> hi, lo;
  double best = 0.0;
  std::size_t left = 0;
  for (std::size_t right = 0; right < points.size(); ++right) {
    while (!hi.empty() && values[hi.back()] <= values[right]) hi.pop_back();
    hi.push_back(right);
    while (!lo.empty() && values[lo.back()] >= values[right]) lo.pop_back();
    lo.push_back(right);
    while (points[right] - points[left] > theta) {
      ++left;
      if (hi.front() < left) hi.pop_front();
      if (lo.front() < left) lo.pop_front();
    }
    best = std::max(best, values[hi.front()] - values[lo.front()]);
  }
  return best;
}

namespace detail {
inline void require_resolved(const MeasurementGrid& grid, double theta) {
  if (!(theta > 0.0)) throw PreconditionError("modulus: theta must be positive");
  if (grid.spacing() > theta / 4.0) {
    throw PreconditionError("modulus: grid spacing " + std::to_string(grid.spacing()) +
                            " too coarse for theta " + std::to_string(theta) +
                            " (need spacing <= theta/4)");
  }
}
}  // namespace detail

/// omega(f, theta). With a closed form attached to f, that value is returned
/// after checking that the grid estimate (always a lower estimate) does not
/// exceed it; otherwise the grid estimate itself.
[[nodiscard]] inline double estimate_modulus(const TestFunction& f, double theta,
                                             const MeasurementGrid& grid) {
  detail::require_resolved(grid, theta);
  const auto values = grid.sample(f.eval);
  const double on_grid = grid_modulus(grid.points(), values, theta);
  if (!f.has_modulus()) return on_grid;
  const double closed = f.modulus(theta);
  if (on_grid > closed + 1e-9) {
    throw PreconditionError("estimate_modulus: closed-form modulus of '" + f.name +
                            "' is below the grid estimate at theta=" + std::to_string(theta));
  }
  return closed;
}

/// max over the grid of |approx(x) - f(x)|.
template <class Approx>
[[nodiscard]] double sup_error(const TestFunction& f, const Approx& approx,
                               const MeasurementGrid& grid) {
  double worst = 0.0;
  for (double x : grid.points()) worst = std::max(worst, std::fabs(approx(x) - f(x)));
  return worst;
}

/// Same, for operator values already sampled on the grid.
[[nodiscard]] inline double sup_error_values(const TestFunction& f, std::span<const double> values,
                                             const MeasurementGrid& grid) {
  if (values.size() != grid.size()) throw PreconditionError("sup_error: size mismatch");
  double worst = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    worst = std::max(worst, std::fabs(values[i] - f(grid.points()[i])));
  }
  return worst;
}

struct ConvergenceRecord {
  std::string function;
  OperatorKind kind = OperatorKind::Basic;
  int n = 0;
  double alpha = 0.0;
  double q = 0.0;
  double beta = 0.0;
  double measured_sup_error = 0.0;
  double bound_value = std::numeric_limits<double>::quiet_NaN();
  BoundKind bound_kind = BoundKind::JacksonBasic;
  /// omega value used in the bound and whether it came from a closed form.
  double omega = std::numeric_limits<double>::quiet_NaN();
  bool omega_closed_form = false;
  bool hypothesis_met = false;
  bool satisfied = false;
  double runtime_ms = 0.0;
  /// Non-empty when evaluation for this n failed.
  std::string error;

  /// A failed evaluation, or a violated estimate whose hypotheses hold and
  /// whose omega is a closed form.
  [[nodiscard]] bool failed() const noexcept {
    return !error.empty() || (hypothesis_met && omega_closed_form && !satisfied);
  }
};

/// Operator values on the grid, then sup error and the matching Jackson
/// estimate per n. Records come back in the order of `ns`. An n violating
/// n^{1-alpha} > 2 (or an unbounded f) gets a record with
/// hypothesis_met = false and no bound. Grid-based omega only serves as a
/// diagnostic: such records are never marked satisfied.
[[nodiscard]] inline std::vector<ConvergenceRecord> run_convergence_sweep(
    const TestFunction& f, const OperatorSpec& prototype, std::span<const int> ns,
    const MeasurementGrid& grid) {
  std::vector<ConvergenceRecord> out;
  for (int n : ns) {
    ConvergenceRecord rec;
    rec.function = f.name;
    rec.kind = prototype.kind();
    rec.n = n;
    rec.alpha = prototype.alpha();
    rec.q = prototype.params().q();
    rec.beta = prototype.params().beta();
    const auto start = std::chrono::steady_clock::now();
    try {
      const OperatorSpec spec = prototype.with_n(n);
      const auto values = grid.sample([&](double x) { return apply(f, spec, x); });
      rec.measured_sup_error = sup_error_values(f, values, grid);
      rec.hypothesis_met = rate_hypothesis_met(n, spec.alpha()) && f.bounded();
      if (rec.hypothesis_met) {
        const double theta = modulus_argument(spec.kind(), n, spec.alpha());
        rec.omega_closed_form = f.has_modulus();
        rec.omega = rec.omega_closed_form ? f.modulus(theta)
                                          : grid_modulus(grid.points(), grid.sample(f.eval), theta);
        const BoundReport b = jackson_bound(spec.kind(), rec.omega, spec.params(), n, spec.alpha(), f.sup_norm);
        rec.bound_value = b.value;
        rec.bound_kind = b.kind;
        rec.satisfied = rec.omega_closed_form && rec.measured_sup_error <= rec.bound_value;
      }
    } catch (const std::exception& e) {
      rec.error = e.what();
      rec.satisfied = false;
    }
    rec.runtime_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    out.push_back(std::move(rec));
  }
  return out;
}

/// Convenience form taking the operator ingredients separately.
[[nodiscard]] inline std::vector<ConvergenceRecord> run_convergence_sweep(
    const TestFunction& f, OperatorKind kind, std::span<const int> ns, double alpha,
    const KernelParams& params, const MeasurementGrid& grid,
    const std::vector<double>& weights = uniform_weights(4), const QuadratureConfig& quad = {}) {
  const int n0 = ns.empty() ? 1 : ns.front();
  const OperatorSpec proto = kind == OperatorKind::Basic ? OperatorSpec::basic(n0, params, alpha, quad)
                             : kind == OperatorKind::Kantorovich
                                 ? OperatorSpec::kantorovich(n0, params, alpha, quad)
                                 : OperatorSpec::quadrature_type(weights, n0, params, alpha, quad);
  return run_convergence_sweep(f, proto, ns, grid);
}

struct SmoothnessRecord {
  double theta = 0.0;
  double omega_f = 0.0;
  double omega_Bf = 0.0;
  bool satisfied = false;
};

/// Grid moduli of f and of the operator output for each theta;
/// satisfied = omega_Bf <= omega_f + slack. Default slack is four times the
/// quadrature absolute tolerance.
[[nodiscard]] inline std::vector<SmoothnessRecord> check_smoothness_preservation(
    const TestFunction& f, const OperatorSpec& spec, std::span<const double> thetas,
    const MeasurementGrid& grid, double slack = -1.0) {
  if (slack < 0.0) slack = 4.0 * spec.quad().abs_tol;
  for (double t : thetas) detail::require_resolved(grid, t);
  const auto fv = grid.sample(f.eval);
  const auto bv = grid.sample([&](double x) { return apply(f, spec, x); });
  std::vector<SmoothnessRecord> out;
  for (double t : thetas) {
    SmoothnessRecord r;
    r.theta = t;
    r.omega_f = grid_modulus(grid.points(), fv, t);
    r.omega_Bf = grid_modulus(grid.points(), bv, t);
    r.satisfied = r.omega_Bf <= r.omega_f + slack;
    out.push_back(r);
  }
  return out;
}

/// Least-squares slope of log(error) against log(n). Any zero error makes
/// the rate degenerate and yields +inf.
[[nodiscard]] inline double fit_rate(std::span<const double> ns, std::span<const double> errors) {
  if (ns.size() != errors.size()) throw PreconditionError("fit_rate: size mismatch");
  if (ns.size() < 3) throw PreconditionError("fit_rate: need at least 3 records");
  for (double e : errors) {
    if (!(e > 0.0)) return std::numeric_limits<double>::infinity();
  }
  const double m = static_cast<double>(ns.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const double lx = std::log(ns[i]);
    const double ly = std::log(errors[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double denom = m * sxx - sx * sx;
  if (denom == 0.0) throw PreconditionError("fit_rate: all n identical");
  return (m * sxy - sx * sy) / denom;
}

[[nodiscard]] inline double fit_rate(std::span<const ConvergenceRecord> records) {
  std::vector<double> ns, errs;
  for (const auto& r : records) {
    ns.push_back(r.n);
    errs.push_back(r.measured_sup_error);
  }
  return fit_rate(ns, errs);
}

struct TaylorRecord {
  std::string function;
  OperatorKind kind = OperatorKind::Basic;
  int n = 0;
  int order = 0;
  std::vector<double> central_moments;  // k = 1..N
  double residual = 0.0;
  double bound_value = 0.0;
  bool satisfied = false;
};

/// Taylor-corrected residual max_x |B f - f - sum_{k<=N} f^(k)/k! m_k| against
/// the matching estimate. Needs N analytic derivatives and a closed-form
/// modulus for f^(N).
[[nodiscard]] inline TaylorRecord measure_taylor_residual(const TestFunction& f,
                                                          const OperatorSpec& spec, int N,
                                                          const MeasurementGrid& grid) {
  if (N < 1) throw PreconditionError("Taylor order N must be >= 1");
  const TestFunction& fN = f.derivative(N);
  if (!fN.has_modulus() || !fN.bounded()) {
    throw PreconditionError("Taylor estimate needs a closed-form modulus and sup norm for " + fN.name);
  }
  TaylorRecord rec;
  rec.function = f.name;
  rec.kind = spec.kind();
  rec.n = spec.n();
  rec.order = N;
  for (int k = 1; k <= N; ++k) rec.central_moments.push_back(central_moment(spec, 0.0, k));

  const auto bv = grid.sample([&](double x) { return apply(f, spec, x); });
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid.points()[i];
    double correction = 0.0;
    for (int k = 1; k <= N; ++k) {
      correction += f.derivative(k)(x) / factorial(k) * rec.central_moments[static_cast<std::size_t>(k - 1)];
    }
    worst = std::max(worst, std::fabs(bv[i] - f(x) - correction));
  }
  rec.residual = worst;
  const double theta = modulus_argument(spec.kind(), spec.n(), spec.alpha());
  rec.bound_value =
      taylor_bound(spec.kind(), fN.modulus(theta), spec.params(), spec.n(), spec.alpha(), N, fN.sup_norm).value;
  rec.satisfied = rec.residual <= rec.bound_value;
  return rec;
}

struct IterationRecord {
  std::string function;
  OperatorKind kind = OperatorKind::Basic;
  std::vector<int> ns;            // resolution of each stage, in application order
  double chain_error = 0.0;       // ||chain(f) - f|| on the grid
  double single_error_sum = 0.0;  // sum_p ||B_{k_p} f - f|| on the grid
  double bound_sum = 0.0;         // sum of per-stage Jackson estimates
  double bound_coarse = 0.0;      // r * estimate at k_1
  double interpolation_residual = 0.0;
  double slack = 0.0;             // r * residual ceiling
  bool satisfied_measured = false;  // chain_error <= single_error_sum + slack
  bool satisfied_bound = false;     // chain_error <= bound_sum + slack
};

/// Measures a chain B_{k_r} o ... o B_{k_1} (equal k for plain iteration).
/// Intermediate stages go through grid approximants, the last stage is exact.
[[nodiscard]] inline IterationRecord measure_chain(const TestFunction& f,
                                                   const OperatorSpec& prototype,
                                                   std::span<const int> ns,
                                                   const MeasurementGrid& grid, int node_count,
                                                   const ApproximantOptions& opts = {}) {
  const auto stages = chain_specs(prototype, ns);
  IterationRecord rec;
  rec.function = f.name;
  rec.kind = prototype.kind();
  rec.ns.assign(ns.begin(), ns.end());

  const auto chain = evaluate_chain(f, stages, grid.points(), grid.domain(), node_count, opts,
                                    &rec.interpolation_residual);
  rec.chain_error = sup_error_values(f, chain, grid);
  rec.slack = static_cast<double>(ns.size()) * opts.residual_ceiling;

  std::vector<BoundReport> per_step;
  const bool bounded = f.bounded() && f.has_modulus();
  bool hypotheses = bounded;
  std::map<int, double> single_error;
  for (const auto& s : stages) {
    auto it = single_error.find(s.n());
    if (it == single_error.end()) {
      const auto single = grid.sample([&](double x) { return apply(f, s, x); });
      it = single_error.emplace(s.n(), sup_error_values(f, single, grid)).first;
    }
    rec.single_error_sum += it->second;
    if (bounded && rate_hypothesis_met(s.n(), s.alpha())) {
      const double theta = modulus_argument(s.kind(), s.n(), s.alpha());
      per_step.push_back(jackson_bound(s.kind(), f.modulus(theta), s.params(), s.n(), s.alpha(), f.sup_norm));
    } else {
      hypotheses = false;
    }
  }
  rec.satisfied_measured = rec.chain_error <= rec.single_error_sum + rec.slack;
  if (hypotheses) {
    const auto mixed = mixed_iterated_bound(per_step);
    rec.bound_sum = mixed.sum.value;
    rec.bound_coarse = mixed.coarse;
    rec.satisfied_bound = rec.chain_error <= rec.bound_sum + rec.slack;
  } else {
    rec.bound_sum = rec.bound_coarse = std::numeric_limits<double>::quiet_NaN();
  }
  return rec;
}

}  // namespace actconv
