#pragma once

// The q-deformed, beta-parametrized half hyperbolic tangent, its activation
// density G and the symmetrized density Psi, plus the closed-form constants
// attached to them.

#include <cmath>
#include <limits>
#include <string>

#include "actconv/error.hpp"

namespace actconv {

/// Deformation q and rate beta of the activation, with derived constants
/// cached for the hot evaluation path.
class KernelParams {
 public:
  KernelParams(double q, double beta) : q_(q), beta_(beta) {
    if (!(q > 0.0) || !std::isfinite(q)) {
      throw PreconditionError("KernelParams: q must be a finite positive real, got " +
                              std::to_string(q));
    }
    if (!(beta > 0.0) || !std::isfinite(beta)) {
      throw PreconditionError("KernelParams: beta must be a finite positive real, got " +
                              std::to_string(beta));
    }
    inv_q_ = 1.0 / q_;
    sinh_beta_ = std::sinh(beta_);
    exp_beta_ = std::exp(beta_);
    exp_neg_beta_ = std::exp(-beta_);
  }

  [[nodiscard]] double q() const noexcept { return q_; }
  [[nodiscard]] double beta() const noexcept { return beta_; }

  /// q + 1/q; at least 2, equal to 2 only for q = 1.
  [[nodiscard]] double q_sum() const noexcept { return q_ + inv_q_; }

  /// Height of the global maximum of G, (1 - e^-beta) / (2 (1 + e^-beta)).
  [[nodiscard]] double g_max_value() const noexcept {
    return (1.0 - exp_neg_beta_) / (2.0 * (1.0 + exp_neg_beta_));
  }

  /// Location of the maximum of G, ln(q) / beta.
  [[nodiscard]] double g_argmax() const noexcept { return std::log(q_) / beta_; }

  /// Parameters with q replaced by 1/q (the mirrored activation).
  [[nodiscard]] KernelParams reciprocal() const { return KernelParams(inv_q_, beta_); }

  [[nodiscard]] double inv_q() const noexcept { return inv_q_; }
  [[nodiscard]] double sinh_beta() const noexcept { return sinh_beta_; }
  [[nodiscard]] double exp_beta() const noexcept { return exp_beta_; }
  [[nodiscard]] double exp_neg_beta() const noexcept { return exp_neg_beta_; }

 private:
  double q_;
  double beta_;
  double inv_q_{};
  double sinh_beta_{};
  double exp_beta_{};
  double exp_neg_beta_{};
};

namespace detail {

inline void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) {
    throw DomainError(std::string(what) + ": argument must be finite");
  }
}

// G for deformation `q` written without the cancellation of the central
// difference: G(x) = q sinh(b) u / ((1 + q e^-b u)(1 + q e^b u)), u = e^{-b x}.
// For x < 0 the same quotient is scaled by e^{2 b x} so nothing overflows.
inline double activation_density(double q, const KernelParams& p, double x) noexcept {
  const double bx = p.beta() * x;
  if (bx >= 0.0) {
    const double u = std::exp(-bx);
    return q * p.sinh_beta() * u /
           ((1.0 + q * p.exp_neg_beta() * u) * (1.0 + q * p.exp_beta() * u));
  }
  const double w = std::exp(bx);
  return q * p.sinh_beta() * w /
         ((w + q * p.exp_neg_beta()) * (w + q * p.exp_beta()));
}

}  // namespace detail

/// The deformed half hyperbolic tangent (1 - q e^{-bx}) / (1 + q e^{-bx}).
/// Saturates to +-1 without overflow.
[[nodiscard]] inline double nu(const KernelParams& p, double x) {
  detail::require_finite(x, "nu");
  const double bx = p.beta() * x;
  if (bx >= 0.0) {
    const double e = p.q() * std::exp(-bx);
    return (1.0 - e) / (1.0 + e);
  }
  const double e = std::exp(bx);
  return (e - p.q()) / (e + p.q());
}

/// Activation density G(x) = (nu(x+1) - nu(x-1)) / 4.
[[nodiscard]] inline double g(const KernelParams& p, double x) {
  detail::require_finite(x, "g");
  return detail::activation_density(p.q(), p, x);
}

/// Symmetrized density Psi = (G_q + G_{1/q}) / 2. Evaluated at |x|, so
/// psi(x) and psi(-x) are bitwise identical.
[[nodiscard]] inline double psi(const KernelParams& p, double x) {
  detail::require_finite(x, "psi");
  const double ax = std::fabs(x);
  return 0.5 * (detail::activation_density(p.q(), p, ax) +
                detail::activation_density(p.inv_q(), p, ax));
}

/// Psi without the finiteness check, for quadrature inner loops whose nodes
/// are finite by construction.
[[nodiscard]] inline double psi_unchecked(const KernelParams& p, double x) noexcept {
  const double ax = std::fabs(x);
  return 0.5 * (detail::activation_density(p.q(), p, ax) +
                detail::activation_density(p.inv_q(), p, ax));
}

/// Exponential majorant (q + 1/q) beta e^{-beta (x-1)} / 2 of Psi, valid for x >= 1.
[[nodiscard]] inline double psi_envelope(const KernelParams& p, double x) {
  detail::require_finite(x, "psi_envelope");
  if (x < 1.0) {
    throw DomainError("psi_envelope: envelope only holds for x >= 1, got " + std::to_string(x));
  }
  return 0.5 * p.q_sum() * p.beta() * std::exp(-p.beta() * (x - 1.0));
}

/// True when n^{1-alpha} > 2, the hypothesis shared by every rate estimate.
[[nodiscard]] inline bool rate_hypothesis_met(int n, double alpha) noexcept {
  return n >= 1 && alpha > 0.0 && alpha < 1.0 &&
         std::pow(static_cast<double>(n), 1.0 - alpha) > 2.0;
}

inline void require_rate_hypothesis(int n, double alpha, const char* where) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw PreconditionError(std::string(where) + ": alpha must lie in (0,1), got " +
                            std::to_string(alpha));
  }
  if (n < 1) {
    throw PreconditionError(std::string(where) + ": n must be a positive integer");
  }
  if (!rate_hypothesis_met(n, alpha)) {
    throw PreconditionError(std::string(where) + ": hypothesis n^(1-alpha) > 2 violated (n=" +
                            std::to_string(n) + ", alpha=" + std::to_string(alpha) + ")");
  }
}

/// Upper bound (q + 1/q) e^{-beta (n^{1-alpha} - 1)} on the kernel mass
/// outside |nx - v| < n^{1-alpha}.
[[nodiscard]] inline double tail_mass_bound(const KernelParams& p, int n, double alpha) {
  require_rate_hypothesis(n, alpha, "tail_mass_bound");
  const double radius = std::pow(static_cast<double>(n), 1.0 - alpha);
  return p.q_sum() * std::exp(-p.beta() * (radius - 1.0));
}

/// k! as a double; rejects k > 170 where it overflows.
[[nodiscard]] inline double factorial(int k) {
  if (k < 0) throw PreconditionError("factorial: negative argument");
  if (k > 170) throw PreconditionError("factorial: k > 170 overflows double");
  double r = 1.0;
  for (int i = 2; i <= k; ++i) r *= static_cast<double>(i);
  return r;
}

/// Bound on the absolute moment of Psi:
///   (1-e^-b)/(1+e^-b) / (k+1) + (q + 1/q) e^b k! / b^k.
[[nodiscard]] inline double moment_bound(const KernelParams& p, int k) {
  if (k < 1) {
    throw PreconditionError("moment_bound: k must be >= 1 (k = 0 is the normalization)");
  }
  const double core = (1.0 - p.exp_neg_beta()) / (1.0 + p.exp_neg_beta()) / (k + 1.0);
  const double tail = p.q_sum() * p.exp_beta() * factorial(k) / std::pow(p.beta(), k);
  if (!std::isfinite(tail)) {
    throw PreconditionError("moment_bound: bound overflows for k = " + std::to_string(k));
  }
  return core + tail;
}

}  // namespace actconv
