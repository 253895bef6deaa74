#pragma once

// Grid approximants of operator outputs. Iterated and chained operators are
// evaluated by sampling each intermediate stage on a grid and interpolating,
// so the cost grows linearly in the number of stages instead of
// exponentially as nested quadrature would.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "actconv/error.hpp"
#include "actconv/operators.hpp"
#include "actconv/parallel.hpp"

namespace actconv {

struct Interval {
  double lo;
  double hi;
};

enum class Interpolation { CubicSpline, BarycentricChebyshev };

struct ApproximantOptions {
  Interpolation interpolation = Interpolation::BarycentricChebyshev;
  /// Validation residual above this flags the approximant.
  double residual_ceiling = 1e-8;
};

/// Ascending Chebyshev-Gauss-Lobatto points on [a, b] (endpoints included).
[[nodiscard]] inline std::vector<double> chebyshev_lobatto_nodes(int count, double a, double b) {
  const int m = count - 1;
  std::vector<double> nodes(static_cast<std::size_t>(count));
  for (int j = 0; j <= m; ++j) {
    const double t = std::cos(std::numbers::pi * j / m);
    nodes[static_cast<std::size_t>(m - j)] = 0.5 * (a + b) + 0.5 * (b - a) * t;
  }
  nodes.front() = a;
  nodes.back() = b;
  return nodes;
}

[[nodiscard]] inline std::vector<double> uniform_nodes(int count, double a, double b) {
  std::vector<double> nodes(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) nodes[static_cast<std::size_t>(i)] = a + (b - a) * i / (count - 1);
  nodes.back() = b;
  return nodes;
}

class GridApproximant {
 public:
  struct Evaluation {
    double value;
    bool extrapolated;
  };

  GridApproximant(Interval domain, std::vector<double> nodes, std::vector<double> values,
                  Interpolation kind)
      : domain_(domain), nodes_(std::move(nodes)), values_(std::move(values)), kind_(kind) {
    if (nodes_.size() != values_.size() || nodes_.size() < 2) {
      throw PreconditionError("GridApproximant: need matching node/value arrays of size >= 2");
    }
    for (std::size_t i = 1; i < nodes_.size(); ++i) {
      if (!(nodes_[i] > nodes_[i - 1])) {
        throw PreconditionError("GridApproximant: nodes must be strictly increasing");
      }
    }
    if (kind_ == Interpolation::BarycentricChebyshev) {
      const std::size_t m = nodes_.size() - 1;
      weights_.resize(nodes_.size());
      for (std::size_t j = 0; j <= m; ++j) {
        const double sign = (j % 2 == 0) ? 1.0 : -1.0;
        weights_[j] = sign * ((j == 0 || j == m) ? 0.5 : 1.0);
      }
    } else {
      build_natural_spline();
    }
  }

  [[nodiscard]] Evaluation evaluate(double x) const {
    if (x <= domain_.lo) return {values_.front(), x < domain_.lo};
    if (x >= domain_.hi) return {values_.back(), x > domain_.hi};
    return {kind_ == Interpolation::BarycentricChebyshev ? barycentric(x) : spline(x), false};
  }

  /// Value with the clamped extension outside the domain.
  double operator()(double x) const { return evaluate(x).value; }

  [[nodiscard]] Interval domain() const noexcept { return domain_; }
  [[nodiscard]] const std::vector<double>& nodes() const noexcept { return nodes_; }
  [[nodiscard]] const std::vector<double>& values() const noexcept { return values_; }
  [[nodiscard]] Interpolation interpolation() const noexcept { return kind_; }

  [[nodiscard]] double validation_residual() const noexcept { return validation_residual_; }
  [[nodiscard]] bool flagged() const noexcept { return flagged_; }
  void set_validation(double residual, bool flagged) noexcept {
    validation_residual_ = residual;
    flagged_ = flagged;
  }

  /// Largest stored magnitude.
  [[nodiscard]] double max_abs_value() const noexcept {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::fabs(v));
    return m;
  }

 private:
  double barycentric(double x) const {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t j = 0; j < nodes_.size(); ++j) {
      const double d = x - nodes_[j];
      if (d == 0.0) return values_[j];
      const double t = weights_[j] / d;
      num += t * values_[j];
      den += t;
    }
    return num / den;
  }

  void build_natural_spline() {
    const std::size_t m = nodes_.size();
    second_.assign(m, 0.0);
    if (m < 3) return;
    // Tridiagonal solve for the second derivatives (natural end conditions).
    std::vector<double> c(m, 0.0), d(m, 0.0);
    for (std::size_t i = 1; i + 1 < m; ++i) {
      const double h0 = nodes_[i] - nodes_[i - 1];
      const double h1 = nodes_[i + 1] - nodes_[i];
      const double a = h0 / 6.0;
      const double b = (h0 + h1) / 3.0;
      const double cc = h1 / 6.0;
      const double rhs = (values_[i + 1] - values_[i]) / h1 - (values_[i] - values_[i - 1]) / h0;
      const double denom = b - a * c[i - 1];
      c[i] = cc / denom;
      d[i] = (rhs - a * d[i - 1]) / denom;
    }
    for (std::size_t i = m - 2; i >= 1; --i) {
      second_[i] = d[i] - c[i] * second_[i + 1];
      if (i == 1) break;
    }
  }

  double spline(double x) const {
    const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x);
    std::size_t i = static_cast<std::size_t>(it - nodes_.begin());
    if (i == 0) i = 1;
    if (i >= nodes_.size()) i = nodes_.size() - 1;
    const double x0 = nodes_[i - 1];
    const double x1 = nodes_[i];
    const double h = x1 - x0;
    const double a = (x1 - x) / h;
    const double b = (x - x0) / h;
    return a * values_[i - 1] + b * values_[i] +
           ((a * a * a - a) * second_[i - 1] + (b * b * b - b) * second_[i]) * h * h / 6.0;
  }

  Interval domain_;
  std::vector<double> nodes_;
  std::vector<double> values_;
  Interpolation kind_;
  std::vector<double> weights_;
  std::vector<double> second_;
  double validation_residual_ = 0.0;
  bool flagged_ = false;
};

/// Wraps an approximant as a bounded continuous function (clamped outside
/// its domain) so it can be fed to the next operator stage.
[[nodiscard]] inline TestFunction as_test_function(const GridApproximant& approx, std::string name) {
  TestFunction f;
  f.name = std::move(name);
  f.eval = [approx](double x) { return approx(x); };
  f.sup_norm = approx.max_abs_value() + std::max(approx.validation_residual(), 1e-12);
  return f;
}

namespace detail {

inline std::vector<double> validation_points(Interpolation kind, int node_count, Interval d) {
  const int m = 2 * node_count;
  std::vector<double> pts(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) {
    double t;
    if (kind == Interpolation::BarycentricChebyshev) {
      t = -std::cos(std::numbers::pi * (2.0 * j + 1.0) / (2.0 * m));  // first-kind points
    } else {
      t = -1.0 + 2.0 * (j + 0.5) / m;
    }
    pts[static_cast<std::size_t>(j)] = 0.5 * (d.lo + d.hi) + 0.5 * (d.hi - d.lo) * t;
  }
  return pts;
}

template <class Source>
GridApproximant sample_and_validate(const Source& source, Interval domain, int node_count,
                                    const ApproximantOptions& opts) {
  if (node_count < 8) throw PreconditionError("grid approximant: node_count must be >= 8");
  if (!(domain.hi > domain.lo)) throw PreconditionError("grid approximant: need b > a");
  std::vector<double> nodes = opts.interpolation == Interpolation::BarycentricChebyshev
                                  ? chebyshev_lobatto_nodes(node_count, domain.lo, domain.hi)
                                  : uniform_nodes(node_count, domain.lo, domain.hi);
  std::vector<double> values(nodes.size());
  parallel_for(nodes.size(), [&](std::size_t i) { values[i] = source(nodes[i]); });
  GridApproximant approx(domain, std::move(nodes), std::move(values), opts.interpolation);

  const auto check = validation_points(opts.interpolation, node_count, domain);
  std::vector<double> gap(check.size());
  parallel_for(check.size(), [&](std::size_t i) { gap[i] = std::fabs(source(check[i]) - approx(check[i])); });
  double residual = 0.0;
  for (double g : gap) residual = std::max(residual, g);
  approx.set_validation(residual, residual > opts.residual_ceiling);
  return approx;
}

}  // namespace detail

/// Samples the operator output on [a, b] and wraps it in an interpolant. The
/// maximum interpolation error on a doubled validation grid is recorded; an
/// approximant whose residual exceeds the ceiling comes back flagged.
[[nodiscard]] inline GridApproximant make_grid_approximant(const TestFunction& f,
                                                           const OperatorSpec& spec,
                                                           Interval domain, int node_count,
                                                           const ApproximantOptions& opts = {}) {
  return detail::sample_and_validate([&](double x) { return apply(f, spec, x); }, domain,
                                     node_count, opts);
}

/// Approximants for each stage of stages[0], stages[1], ... applied in order
/// to f. Stage i lives on `domain` widened by the reach of every later stage
/// (including `trailing` stages that will be evaluated exactly), so the
/// clamped extension is only ever seen by negligible kernel mass.
[[nodiscard]] inline std::vector<GridApproximant> approximate_chain(
    const TestFunction& f, std::span<const OperatorSpec> stages, Interval domain, int node_count,
    const ApproximantOptions& opts = {}, std::span<const OperatorSpec> trailing = {}) {
  std::vector<double> pad(stages.size(), 0.0);
  double later = 0.0;
  for (const auto& s : trailing) later += s.reach();
  for (std::size_t i = stages.size(); i-- > 0;) {
    pad[i] = later;
    later += stages[i].reach();
  }

  std::vector<GridApproximant> out;
  out.reserve(stages.size());
  TestFunction current = f;
  for (std::size_t i = 0; i < stages.size(); ++i) {
    const Interval d{domain.lo - pad[i], domain.hi + pad[i]};
    GridApproximant a = make_grid_approximant(current, stages[i], d, node_count, opts);
    if (a.flagged()) {
      std::ostringstream msg;
      msg.precision(6);
      msg << "operator chain aborted at stage " << (i + 1) << " of " << stages.size()
          << ": interpolation residual " << a.validation_residual() << " exceeds ceiling "
          << opts.residual_ceiling;
      throw ConvergenceError(msg.str());
    }
    current = as_test_function(a, f.name + "#" + std::to_string(i + 1));
    out.push_back(std::move(a));
  }
  return out;
}

/// r-fold self-composition of the operator, as a grid approximant.
[[nodiscard]] inline GridApproximant iterate(const TestFunction& f, const OperatorSpec& spec, int r,
                                             Interval domain, int node_count,
                                             const ApproximantOptions& opts = {}) {
  if (r < 1) throw PreconditionError("iterate: r must be >= 1");
  const std::vector<OperatorSpec> stages(static_cast<std::size_t>(r), spec);
  return approximate_chain(f, stages, domain, node_count, opts).back();
}

/// Checks k_1 <= k_2 <= ... (equal neighbours allowed) and builds the specs.
[[nodiscard]] inline std::vector<OperatorSpec> chain_specs(const OperatorSpec& prototype,
                                                           std::span<const int> ns) {
  if (ns.empty()) throw PreconditionError("operator chain: ns must be nonempty");
  std::vector<OperatorSpec> out;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (i > 0 && ns[i] < ns[i - 1]) {
      throw PreconditionError("operator chain: ns must be non-decreasing");
    }
    out.push_back(prototype.with_n(ns[i]));
  }
  return out;
}

/// B_{k_r}(...B_{k_2}(B_{k_1} f)) as a grid approximant. `prototype` fixes
/// kind, kernel, alpha, weights and quadrature settings; its n is ignored.
[[nodiscard]] inline GridApproximant compose_mixed(const TestFunction& f,
                                                   const OperatorSpec& prototype,
                                                   std::span<const int> ns, Interval domain,
                                                   int node_count,
                                                   const ApproximantOptions& opts = {}) {
  const auto stages = chain_specs(prototype, ns);
  return approximate_chain(f, stages, domain, node_count, opts).back();
}

/// Values of the full chain at `points`: every stage but the last goes
/// through an approximant, the last is applied exactly. A one-stage chain
/// therefore reproduces `apply` bit for bit.
[[nodiscard]] inline std::vector<double> evaluate_chain(const TestFunction& f,
                                                        std::span<const OperatorSpec> stages,
                                                        std::span<const double> points,
                                                        Interval domain, int node_count,
                                                        const ApproximantOptions& opts = {},
                                                        double* max_residual = nullptr) {
  if (stages.empty()) throw PreconditionError("evaluate_chain: no stages");
  const auto head = stages.first(stages.size() - 1);
  const auto tail = stages.last(1);
  const auto approximants = approximate_chain(f, head, domain, node_count, opts, tail);
  TestFunction input = approximants.empty()
                           ? f
                           : as_test_function(approximants.back(), f.name + "#" + std::to_string(head.size()));
  if (max_residual != nullptr) {
    *max_residual = 0.0;
    for (const auto& a : approximants) *max_residual = std::max(*max_residual, a.validation_residual());
  }
  std::vector<double> values(points.size());
  parallel_for(points.size(), [&](std::size_t i) { values[i] = apply(input, tail.front(), points[i]); });
  return values;
}

}  // namespace actconv
