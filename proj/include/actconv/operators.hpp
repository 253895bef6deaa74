#pragma once

// The three convolution operators driven by the symmetrized density:
//
//   basic        B_n f(x)  = int f(x - h/n) Psi(h) dh
//   Kantorovich  B*_n f(x) = int n int_0^{1/n} f(t + x - h/n) dt Psi(h) dh
//   quadrature   B^_n f(x) = int sum_s w_s f(x - h/n + s/(n r)) Psi(h) dh
//
// All three are evaluated in the substituted h-form so the kernel is always
// centred at the origin and the truncation window never moves.

#include <cmath>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "actconv/error.hpp"
#include "actconv/kernel.hpp"
#include "actconv/quadrature.hpp"
#include "actconv/test_function.hpp"

namespace actconv {

enum class OperatorKind { Basic, Kantorovich, Quadrature };

[[nodiscard]] inline std::string_view to_string(OperatorKind k) noexcept {
  switch (k) {
    case OperatorKind::Basic: return "basic";
    case OperatorKind::Kantorovich: return "kantorovich";
    case OperatorKind::Quadrature: return "quadrature";
  }
  return "unknown";
}

[[nodiscard]] inline OperatorKind parse_operator_kind(std::string_view s) {
  if (s == "basic") return OperatorKind::Basic;
  if (s == "kantorovich") return OperatorKind::Kantorovich;
  if (s == "quadrature") return OperatorKind::Quadrature;
  throw PreconditionError("unknown operator kind '" + std::string(s) +
                          "' (expected basic|kantorovich|quadrature)");
}

/// r equal weights 1/r.
[[nodiscard]] inline std::vector<double> uniform_weights(int r) {
  if (r < 1) throw PreconditionError("uniform_weights: r must be >= 1");
  return std::vector<double>(static_cast<std::size_t>(r), 1.0 / r);
}

class OperatorSpec {
 public:
  static OperatorSpec basic(int n, KernelParams params, double alpha = 0.5,
                            QuadratureConfig quad = {}) {
    return OperatorSpec(OperatorKind::Basic, n, params, alpha, {}, quad);
  }
  static OperatorSpec kantorovich(int n, KernelParams params, double alpha = 0.5,
                                  QuadratureConfig quad = {}, int inner_order = 12) {
    OperatorSpec s(OperatorKind::Kantorovich, n, params, alpha, {}, quad);
    s.inner_rule_ = GaussLegendreRule(inner_order);
    return s;
  }
  static OperatorSpec quadrature_type(std::vector<double> weights, int n, KernelParams params,
                                      double alpha = 0.5, QuadratureConfig quad = {},
                                      double weight_tol = 1e-12) {
    return OperatorSpec(OperatorKind::Quadrature, n, params, alpha, std::move(weights), quad,
                        weight_tol);
  }
  /// Same operator family at a different resolution.
  [[nodiscard]] OperatorSpec with_n(int n) const {
    OperatorSpec s = *this;
    s.n_ = n;
    s.validate();
    return s;
  }

  [[nodiscard]] OperatorKind kind() const noexcept { return kind_; }
  [[nodiscard]] int n() const noexcept { return n_; }
  [[nodiscard]] const KernelParams& params() const noexcept { return params_; }
  [[nodiscard]] double alpha() const noexcept { return alpha_; }
  [[nodiscard]] const std::vector<double>& weights() const noexcept { return weights_; }
  [[nodiscard]] int r() const noexcept { return static_cast<int>(weights_.size()); }
  [[nodiscard]] const QuadratureConfig& quad() const noexcept { return quad_; }
  [[nodiscard]] const GaussLegendreRule& inner_rule() const noexcept { return inner_rule_; }

  /// Farthest the operator looks from x: kernel window plus the sampling
  /// shift (up to 1/n for the Kantorovich and quadrature kinds).
  [[nodiscard]] double reach() const {
    const double window = truncation_radius(params_, quad_.truncation_eps) / n_;
    return kind_ == OperatorKind::Basic ? window : window + 1.0 / n_;
  }

 private:
  OperatorSpec(OperatorKind kind, int n, KernelParams params, double alpha,
               std::vector<double> weights, QuadratureConfig quad, double weight_tol = 1e-12)
      : kind_(kind), n_(n), params_(params), alpha_(alpha), weights_(std::move(weights)),
        quad_(quad), weight_tol_(weight_tol) {
    validate();
  }

  void validate() const {
    if (n_ < 1) throw PreconditionError("OperatorSpec: n must be >= 1");
    if (!(alpha_ > 0.0 && alpha_ < 1.0)) {
      throw PreconditionError("OperatorSpec: alpha must lie in (0,1)");
    }
    quad_.validate();
    if (kind_ == OperatorKind::Quadrature) {
      if (weights_.empty()) throw PreconditionError("OperatorSpec: quadrature kind needs weights");
      double sum = 0.0;
      for (double w : weights_) {
        if (!(w >= 0.0)) throw PreconditionError("OperatorSpec: weights must be nonnegative");
        sum += w;
      }
      if (std::fabs(sum - 1.0) > weight_tol_) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "OperatorSpec: weights must sum to 1 (got " << sum << ")";
        throw PreconditionError(msg.str());
      }
    }
  }

  OperatorKind kind_;
  int n_;
  KernelParams params_;
  double alpha_;
  std::vector<double> weights_;
  QuadratureConfig quad_;
  double weight_tol_;
  GaussLegendreRule inner_rule_{12};
};

namespace detail {

// Constant c with |f(x - h/n + shift)| <= c on the window. Unbounded inputs
// (id, polynomials) are sized for linear growth around x; the symmetric
// window keeps odd contributions exact.
inline double window_bound(const TestFunction& f, double x) {
  if (f.bounded()) return f.sup_norm;
  return 1.0 + std::fabs(x);
}

[[noreturn]] inline void report_nonconvergence(const OperatorSpec& spec, const TestFunction& f,
                                               double x, const IntegralResult& r) {
  std::ostringstream msg;
  msg.precision(17);
  msg << to_string(spec.kind()) << " operator did not converge: f=" << f.name << " n=" << spec.n()
      << " x=" << x << " error_estimate=" << r.error_estimate
      << " subdivisions=" << r.subdivisions_used;
  throw ConvergenceError(msg.str());
}

template <class Integrand>
double convolve_with_kernel(const OperatorSpec& spec, const TestFunction& f, double x,
                            const Integrand& integrand, std::span<const double> breakpoints) {
  const KernelParams& p = spec.params();
  auto weighted = [&](double h) { return integrand(h) * psi_unchecked(p, h); };
  const RealLineDecay decay{p, window_bound(f, x)};
  const IntegralResult r = integrate_real_line(weighted, decay, spec.quad(), breakpoints);
  if (!r.converged) report_nonconvergence(spec, f, x, r);
  return r.value;
}

inline void require_kind(const OperatorSpec& spec, OperatorKind k, const char* where) {
  if (spec.kind() != k) {
    throw PreconditionError(std::string(where) + ": operator spec has kind " +
                            std::string(to_string(spec.kind())));
  }
}

}  // namespace detail

/// Basic operator at x.
[[nodiscard]] inline double apply_basic(const TestFunction& f, const OperatorSpec& spec, double x) {
  detail::require_kind(spec, OperatorKind::Basic, "apply_basic");
  detail::require_finite(x, "apply_basic");
  const double n = spec.n();
  std::vector<double> breaks;
  for (double k : f.kinks) breaks.push_back(n * (x - k));
  return detail::convolve_with_kernel(
      spec, f, x, [&](double h) { return f.eval(x - h / n); }, breaks);
}

/// Kantorovich operator at x: the inner average over [0, 1/n] uses the
/// spec's fixed Gauss-Legendre rule, split at any kink of f.
[[nodiscard]] inline double apply_kantorovich(const TestFunction& f, const OperatorSpec& spec,
                                              double x) {
  detail::require_kind(spec, OperatorKind::Kantorovich, "apply_kantorovich");
  detail::require_finite(x, "apply_kantorovich");
  const double n = spec.n();
  const double step = 1.0 / n;
  const GaussLegendreRule& rule = spec.inner_rule();

  std::vector<double> breaks;
  for (double k : f.kinks) {
    breaks.push_back(n * (x - k));
    breaks.push_back(n * (x - k) + 1.0);
  }

  auto inner = [&](double h) {
    const double base = x - h / n;
    auto shifted = [&](double t) { return f.eval(t + base); };
    if (f.kinks.empty()) return n * rule.integrate(shifted, 0.0, step);
    // Kinks falling inside (0, 1/n) split the average.
    double lo = 0.0;
    double acc = 0.0;
    for (double k : f.kinks) {
      const double t = k - base;
      if (t > lo && t < step) {
        acc += rule.integrate(shifted, lo, t);
        lo = t;
      }
    }
    acc += rule.integrate(shifted, lo, step);
    return n * acc;
  };
  return detail::convolve_with_kernel(spec, f, x, inner, breaks);
}

/// Quadrature-type operator at x with the spec's weights w_1..w_r.
[[nodiscard]] inline double apply_quadrature_kind(const TestFunction& f, const OperatorSpec& spec,
                                                  double x) {
  detail::require_kind(spec, OperatorKind::Quadrature, "apply_quadrature_kind");
  detail::require_finite(x, "apply_quadrature_kind");
  const double n = spec.n();
  const auto& w = spec.weights();
  const double r = static_cast<double>(w.size());

  std::vector<double> breaks;
  for (double k : f.kinks) {
    for (std::size_t s = 1; s <= w.size(); ++s) breaks.push_back(n * (x - k) + s / r);
  }
  auto sampled = [&](double h) {
    const double base = x - h / n;
    double acc = 0.0;
    for (std::size_t s = 1; s <= w.size(); ++s) acc += w[s - 1] * f.eval(base + s / (n * r));
    return acc;
  };
  return detail::convolve_with_kernel(spec, f, x, sampled, breaks);
}

/// Dispatch on the operator kind.
[[nodiscard]] inline double apply(const TestFunction& f, const OperatorSpec& spec, double x) {
  switch (spec.kind()) {
    case OperatorKind::Basic: return apply_basic(f, spec, x);
    case OperatorKind::Kantorovich: return apply_kantorovich(f, spec, x);
    case OperatorKind::Quadrature: return apply_quadrature_kind(f, spec, x);
  }
  throw PreconditionError("apply: unknown operator kind");
}

/// k-th derivative of the operator output, represented as the operator
/// applied to the analytic k-th derivative of f.
[[nodiscard]] inline double apply_derivative(const TestFunction& f, const OperatorSpec& spec,
                                             int k, double x) {
  if (k < 1) throw PreconditionError("apply_derivative: k must be >= 1");
  return apply(f.derivative(k), spec, x);
}

namespace detail {

// Two-sided envelope bound on int_{|h|>R} ((1+|h|)/n)^k Psi(h) dh:
// (q + 1/q) e^{2b} Gamma(k+1, b(R+1)) / (b^k n^k).
inline double polynomial_tail_bound(const KernelParams& p, int n, int k, double radius) {
  const double b = p.beta();
  return p.q_sum() * std::exp(2.0 * b) *
         boost::math::tgamma(static_cast<double>(k + 1), b * (radius + 1.0)) /
         (std::pow(b, k) * std::pow(static_cast<double>(n), k));
}

}  // namespace detail

/// The operator applied to v -> (v - x)^k, evaluated at x. The value does
/// not depend on x (all three operators commute with translation); x is kept
/// for interface symmetry with the Taylor correction terms.
[[nodiscard]] inline double central_moment(const OperatorSpec& spec, double x, int k) {
  (void)x;
  if (k < 1) throw PreconditionError("central_moment: k must be >= 1");
  const KernelParams& p = spec.params();
  const double n = spec.n();
  const QuadratureConfig& cfg = spec.quad();

  double radius = truncation_radius(p, cfg.truncation_eps);
  while (detail::polynomial_tail_bound(p, spec.n(), k, radius) > cfg.truncation_eps) radius += 1.0;

  auto integrate_moment = [&](auto&& m) {
    auto weighted = [&](double h) { return m(h) * psi_unchecked(p, h); };
    const IntegralResult r = integrate_interval(weighted, -radius, radius, cfg);
    if (!r.converged) {
      throw ConvergenceError("central_moment: quadrature did not converge (k=" +
                             std::to_string(k) + ", n=" + std::to_string(spec.n()) + ")");
    }
    return r.value;
  };

  switch (spec.kind()) {
    case OperatorKind::Basic:
      return integrate_moment([&](double h) { return std::pow(-h / n, k); });
    case OperatorKind::Kantorovich:
      // n int_0^{1/n} (t - h/n)^k dt in closed form.
      return integrate_moment([&](double h) {
        return (std::pow(1.0 - h, k + 1) - std::pow(-h, k + 1)) / ((k + 1) * std::pow(n, k));
      });
    case OperatorKind::Quadrature: {
      const auto& w = spec.weights();
      const double r = static_cast<double>(w.size());
      return integrate_moment([&](double h) {
        double acc = 0.0;
        for (std::size_t s = 1; s <= w.size(); ++s) acc += w[s - 1] * std::pow(s / (n * r) - h / n, k);
        return acc;
      });
    }
  }
  throw PreconditionError("central_moment: unknown operator kind");
}

}  // namespace actconv
