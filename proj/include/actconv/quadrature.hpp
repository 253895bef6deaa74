#pragma once

// Adaptive Gauss-Kronrod integration on finite intervals and on the real
// line, where the window is cut at a radius derived from the exponential
// envelope of the kernel.

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/legendre.hpp>

#include "actconv/error.hpp"
#include "actconv/kernel.hpp"

namespace actconv {

struct QuadratureConfig {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  int max_subdivisions = 2000;
  /// Kernel mass allowed outside the real-line truncation window.
  double truncation_eps = 1e-12;

  void validate() const {
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0) || !(truncation_eps > 0.0)) {
      throw PreconditionError("QuadratureConfig: tolerances must be strictly positive");
    }
    if (max_subdivisions < 1) {
      throw PreconditionError("QuadratureConfig: max_subdivisions must be >= 1");
    }
  }

  /// Non-fatal configuration smells.
  [[nodiscard]] std::vector<std::string> warnings() const {
    std::vector<std::string> out;
    if (truncation_eps >= abs_tol) {
      out.emplace_back("truncation_eps >= abs_tol: the truncated tail may dominate the error budget");
    }
    return out;
  }
};

struct IntegralResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int subdivisions_used = 0;
  bool converged = true;
};

/// Radius R = 1 + ln((q + 1/q) / eps) / beta beyond which Psi carries at most
/// eps of mass (two-sided).
[[nodiscard]] inline double truncation_radius(const KernelParams& p, double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    throw PreconditionError("truncation_radius: eps must be a finite positive real");
  }
  if (eps >= p.q_sum()) return 1.0;
  return 1.0 + std::log(p.q_sum() / eps) / p.beta();
}

namespace detail {

struct KronrodPanel {
  double value;
  double error;
};

// 15-point Kronrod rule with the embedded 7-point Gauss rule on [a, b].
template <class F>
KronrodPanel kronrod15(const F& f, double a, double b) {
  using boost::math::quadrature::gauss;
  using boost::math::quadrature::gauss_kronrod;
  const auto& x = gauss_kronrod<double, 15>::abscissa();
  const auto& wk = gauss_kronrod<double, 15>::weights();
  const auto& wg = gauss<double, 7>::weights();

  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double f0 = f(c);
  double kronrod = f0 * wk[0];
  double gaussian = f0 * wg[0];
  for (std::size_t i = 1; i < x.size(); ++i) {
    const double fp = f(c + h * x[i]);
    const double fm = f(c - h * x[i]);
    kronrod += (fp + fm) * wk[i];
    if (i % 2 == 0) gaussian += (fp + fm) * wg[i / 2];
  }
  kronrod *= h;
  gaussian *= h;
  const double floor = 2.0 * std::numeric_limits<double>::epsilon() * std::fabs(kronrod);
  return {kronrod, std::max(std::fabs(kronrod - gaussian), floor)};
}

}  // namespace detail

/// Adaptive integration of f over [a, b] by strict bisection. Each accepted
/// panel meets tol * width / (b - a), tol = max(abs_tol, rel_tol |I|).
/// `breakpoints` inside (a, b) become initial panel boundaries, which keeps
/// known kinks off panel interiors. Panels are processed left to right, so
/// identical inputs give bit-identical results.
template <class F>
[[nodiscard]] IntegralResult integrate_interval(const F& f, double a, double b,
                                                const QuadratureConfig& cfg,
                                                std::span<const double> breakpoints = {}) {
  if (!(a <= b)) throw PreconditionError("integrate_interval: requires a <= b");
  if (a == b) return {};

  std::vector<double> edges{a};
  {
    std::vector<double> inner;
    for (double p : breakpoints) {
      if (p > a && p < b) inner.push_back(p);
    }
    std::sort(inner.begin(), inner.end());
    inner.erase(std::unique(inner.begin(), inner.end()), inner.end());
    edges.insert(edges.end(), inner.begin(), inner.end());
    edges.push_back(b);
  }

  struct Panel {
    double lo, hi;
    detail::KronrodPanel rule;
  };
  std::vector<Panel> pending;
  double first_pass = 0.0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    auto rule = detail::kronrod15(f, edges[i], edges[i + 1]);
    first_pass += rule.value;
    pending.push_back({edges[i], edges[i + 1], rule});
  }
  std::reverse(pending.begin(), pending.end());  // stack: leftmost on top

  const double width = b - a;
  const double tol = std::max(cfg.abs_tol, cfg.rel_tol * std::fabs(first_pass));

  IntegralResult out;
  while (!pending.empty()) {
    Panel panel = pending.back();
    pending.pop_back();
    const double budget = tol * (panel.hi - panel.lo) / width;
    const bool exhausted = out.subdivisions_used >= cfg.max_subdivisions;
    if (panel.rule.error <= budget || exhausted) {
      if (panel.rule.error > budget) out.converged = false;
      out.value += panel.rule.value;
      out.error_estimate += panel.rule.error;
      continue;
    }
    const double mid = 0.5 * (panel.lo + panel.hi);
    if (!(mid > panel.lo && mid < panel.hi)) {  // panel no longer splittable
      out.converged = false;
      out.value += panel.rule.value;
      out.error_estimate += panel.rule.error;
      continue;
    }
    ++out.subdivisions_used;
    pending.push_back({mid, panel.hi, detail::kronrod15(f, mid, panel.hi)});
    pending.push_back({panel.lo, mid, detail::kronrod15(f, panel.lo, mid)});
  }
  return out;
}

/// How a real-line integrand decays: |f(h)| <= bound_constant * Psi(h) for
/// large |h|, with Psi built from `params`.
struct RealLineDecay {
  KernelParams params;
  double bound_constant = 1.0;
};

/// Integral of f over the real line, truncated to [-R, R] with
/// R = truncation_radius(params, truncation_eps / c). The tail allowance
/// (at most truncation_eps) is added to the error estimate.
template <class F>
[[nodiscard]] IntegralResult integrate_real_line(const F& f, const RealLineDecay& decay,
                                                 const QuadratureConfig& cfg,
                                                 std::span<const double> breakpoints = {}) {
  const double c = decay.bound_constant;
  if (!(c >= 0.0) || !std::isfinite(c)) {
    throw PreconditionError("integrate_real_line: bound constant must be finite and >= 0");
  }
  const double radius =
      c == 0.0 ? 1.0 : truncation_radius(decay.params, cfg.truncation_eps / c);
  IntegralResult r = integrate_interval(f, -radius, radius, cfg, breakpoints);
  r.error_estimate += cfg.truncation_eps;
  return r;
}

/// Non-adaptive Gauss-Legendre rule of fixed order, used for the short
/// averaging window of the Kantorovich operator.
class GaussLegendreRule {
 public:
  explicit GaussLegendreRule(int order = 12) {
    if (order < 1 || order > 128) {
      throw PreconditionError("GaussLegendreRule: order must lie in [1, 128]");
    }
    const auto zeros = boost::math::legendre_p_zeros<double>(order);  // non-negative half
    for (double z : zeros) {
      const double dp = boost::math::legendre_p_prime<double>(order, z);
      const double w = 2.0 / ((1.0 - z * z) * dp * dp);
      if (z == 0.0) {
        nodes_.push_back(0.0);
        weights_.push_back(w);
      } else {
        nodes_.push_back(-z);
        weights_.push_back(w);
        nodes_.push_back(z);
        weights_.push_back(w);
      }
    }
    // Ascending node order keeps summation order fixed.
    std::vector<std::size_t> idx(nodes_.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t l, std::size_t r) { return nodes_[l] < nodes_[r]; });
    std::vector<double> n2, w2;
    for (auto i : idx) {
      n2.push_back(nodes_[i]);
      w2.push_back(weights_[i]);
    }
    nodes_ = std::move(n2);
    weights_ = std::move(w2);
  }

  [[nodiscard]] int order() const noexcept { return static_cast<int>(nodes_.size()); }
  [[nodiscard]] std::span<const double> nodes() const noexcept { return nodes_; }
  [[nodiscard]] std::span<const double> weights() const noexcept { return weights_; }

  template <class F>
  [[nodiscard]] double integrate(const F& f, double a, double b) const {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double s = 0.0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) s += weights_[i] * f(c + h * nodes_[i]);
    return s * h;
  }

 private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

}  // namespace actconv
