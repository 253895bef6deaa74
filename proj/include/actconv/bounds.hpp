#pragma once

// Right-hand sides of the quantitative estimates. Everything here is
// arithmetic on already-evaluated moduli and sup norms, so each report
// records exactly which numbers went in.

#include <cmath>
#include <span>
#include <string_view>
#include <vector>

#include "actconv/error.hpp"
#include "actconv/kernel.hpp"
#include "actconv/operators.hpp"

namespace actconv {

enum class BoundKind {
  JacksonBasic,
  JacksonKantorovich,
  JacksonQuadrature,
  TaylorBasic,
  TaylorKantorovich,
  TaylorQuadrature,
  Iterated,
  MixedIterated,
  CentralMoment,
};

[[nodiscard]] inline std::string_view to_string(BoundKind k) noexcept {
  switch (k) {
    case BoundKind::JacksonBasic: return "jackson-basic";
    case BoundKind::JacksonKantorovich: return "jackson-kantorovich";
    case BoundKind::JacksonQuadrature: return "jackson-quadrature";
    case BoundKind::TaylorBasic: return "taylor-basic";
    case BoundKind::TaylorKantorovich: return "taylor-kantorovich";
    case BoundKind::TaylorQuadrature: return "taylor-quadrature";
    case BoundKind::Iterated: return "iterated";
    case BoundKind::MixedIterated: return "mixed-iterated";
    case BoundKind::CentralMoment: return "central-moment";
  }
  return "unknown";
}

struct BoundInputs {
  int n = 0;
  double alpha = 0.0;
  double q = 0.0;
  double beta = 0.0;
  /// Taylor order N or moment order k; 0 when unused.
  int order = 0;
  /// Iteration count; 1 for single-step bounds.
  int r = 1;
  std::vector<double> omega_values;
  std::vector<double> sup_norms;
};

struct BoundReport {
  BoundKind kind;
  OperatorKind operator_kind;
  BoundInputs inputs;
  double value = 0.0;
  bool hypotheses_met = true;
};

/// Argument at which the modulus enters the bounds: 1/n^alpha for the basic
/// operator, 1/n + 1/n^alpha for the shifted kinds.
[[nodiscard]] inline double modulus_argument(OperatorKind kind, int n, double alpha) {
  const double core = std::pow(static_cast<double>(n), -alpha);
  return kind == OperatorKind::Basic ? core : core + 1.0 / n;
}

/// Jackson-type estimate omega_at + 2 (q + 1/q) ||f|| / e^{beta (n^{1-alpha} - 1)}.
/// The caller evaluates omega_at at `modulus_argument(kind, n, alpha)`;
/// applied to f^(k) it is the derivative version of the same estimate.
[[nodiscard]] inline BoundReport jackson_bound(OperatorKind kind, double omega_at,
                                               const KernelParams& p, int n, double alpha,
                                               double sup_norm) {
  require_rate_hypothesis(n, alpha, "jackson_bound");
  if (!(omega_at >= 0.0) || !(sup_norm >= 0.0)) {
    throw PreconditionError("jackson_bound: modulus and sup norm must be nonnegative");
  }
  BoundReport rep{};
  rep.kind = kind == OperatorKind::Basic         ? BoundKind::JacksonBasic
             : kind == OperatorKind::Kantorovich ? BoundKind::JacksonKantorovich
                                                 : BoundKind::JacksonQuadrature;
  rep.operator_kind = kind;
  rep.inputs = {n, alpha, p.q(), p.beta(), 0, 1, {omega_at}, {sup_norm}};
  const double radius = std::pow(static_cast<double>(n), 1.0 - alpha);
  rep.value = omega_at + 2.0 * p.q_sum() * sup_norm * std::exp(-p.beta() * (radius - 1.0));
  return rep;
}

/// Bound on |central_moment(k)|: for the basic kind the absolute-moment
/// bound over n^k; for the shifted kinds 2^{k-1}/n^k times one plus it.
[[nodiscard]] inline double central_moment_bound(OperatorKind kind, int k, const KernelParams& p,
                                                 int n) {
  if (k < 1) throw PreconditionError("central_moment_bound: k must be >= 1");
  if (n < 1) throw PreconditionError("central_moment_bound: n must be >= 1");
  const double bracket = moment_bound(p, k);
  const double nk = std::pow(static_cast<double>(n), k);
  if (kind == OperatorKind::Basic) return bracket / nk;
  return std::pow(2.0, k - 1) / nk * (1.0 + bracket);
}

/// Bound on the Taylor-corrected residual
/// |B f(x) - f(x) - sum_{k<=N} f^(k)(x)/k! * central_moment(k)|.
/// omega_N is omega(f^(N), modulus_argument(kind, n, alpha)) and
/// sup_norm_fN is ||f^(N)||.
[[nodiscard]] inline BoundReport taylor_bound(OperatorKind kind, double omega_N,
                                              const KernelParams& p, int n, double alpha, int N,
                                              double sup_norm_fN) {
  require_rate_hypothesis(n, alpha, "taylor_bound");
  if (N < 1) throw PreconditionError("taylor_bound: N must be >= 1");
  if (!(omega_N >= 0.0) || !(sup_norm_fN >= 0.0)) {
    throw PreconditionError("taylor_bound: modulus and sup norm must be nonnegative");
  }
  BoundReport rep{};
  rep.operator_kind = kind;
  rep.inputs = {n, alpha, p.q(), p.beta(), N, 1, {omega_N}, {sup_norm_fN}};

  const double nd = static_cast<double>(n);
  const double b = p.beta();
  const double n_fact = factorial(N);
  const double decay = std::exp(-b * std::pow(nd, 1.0 - alpha) / 2.0);
  if (kind == OperatorKind::Basic) {
    rep.kind = BoundKind::TaylorBasic;
    rep.value = omega_N / (std::pow(nd, alpha * N) * n_fact) +
                std::pow(2.0, N + 2) * sup_norm_fN * p.exp_beta() * p.q_sum() /
                    (std::pow(nd, N) * std::pow(b, N)) * decay;
  } else {
    rep.kind = kind == OperatorKind::Kantorovich ? BoundKind::TaylorKantorovich
                                                 : BoundKind::TaylorQuadrature;
    const double delta = 1.0 / nd + std::pow(nd, -alpha);
    rep.value = omega_N * std::pow(delta, N) / n_fact +
                std::pow(2.0, N) * sup_norm_fN / (std::pow(nd, N) * n_fact) * p.q_sum() *
                    p.exp_beta() * decay * (1.0 + std::pow(2.0, N + 1) * n_fact / std::pow(b, N));
  }
  return rep;
}

/// r times a single-step estimate.
[[nodiscard]] inline BoundReport iterated_bound(const BoundReport& single_step, int r) {
  if (r < 1) throw PreconditionError("iterated_bound: r must be >= 1");
  if (r == 1) return single_step;
  BoundReport rep = single_step;
  rep.kind = BoundKind::Iterated;
  rep.inputs.r = r;
  rep.value = r * single_step.value;
  return rep;
}

struct MixedIteratedBound {
  BoundReport sum;
  /// r times the estimate at the smallest resolution k_1.
  double coarse = 0.0;
  /// sum <= coarse; holds whenever the per-stage estimates do not grow with k.
  bool sum_within_coarse = true;
};

/// Sum of the per-stage estimates for k_1 <= ... <= k_r, plus the coarser
/// r * (estimate at k_1).
[[nodiscard]] inline MixedIteratedBound mixed_iterated_bound(std::span<const BoundReport> per_step) {
  if (per_step.empty()) throw PreconditionError("mixed_iterated_bound: empty list");
  for (std::size_t i = 1; i < per_step.size(); ++i) {
    if (per_step[i].inputs.n < per_step[i - 1].inputs.n) {
      throw PreconditionError("mixed_iterated_bound: resolutions must be non-decreasing");
    }
  }
  MixedIteratedBound out{per_step.front(), 0.0, true};
  if (per_step.size() == 1) {
    out.coarse = per_step.front().value;
    return out;
  }
  out.sum.kind = BoundKind::MixedIterated;
  out.sum.inputs.r = static_cast<int>(per_step.size());
  out.sum.inputs.omega_values.clear();
  out.sum.inputs.sup_norms.clear();
  double total = 0.0;
  for (const auto& s : per_step) {
    total += s.value;
    out.sum.hypotheses_met = out.sum.hypotheses_met && s.hypotheses_met;
    out.sum.inputs.omega_values.insert(out.sum.inputs.omega_values.end(),
                                       s.inputs.omega_values.begin(), s.inputs.omega_values.end());
    out.sum.inputs.sup_norms.insert(out.sum.inputs.sup_norms.end(), s.inputs.sup_norms.begin(),
                                    s.inputs.sup_norms.end());
  }
  out.sum.value = total;
  out.coarse = static_cast<double>(per_step.size()) * per_step.front().value;
  out.sum_within_coarse = out.sum.value <= out.coarse * (1.0 + 1e-12);
  return out;
}

}  // namespace actconv
