#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "actconv/quadrature.hpp"

using namespace actconv;
using Catch::Approx;

TEST_CASE("config validation and warnings") {
  QuadratureConfig c;
  CHECK_NOTHROW(c.validate());
  CHECK(c.warnings().empty());
  c.abs_tol = 0.0;
  CHECK_THROWS_AS(c.validate(), PreconditionError);
  c = {};
  c.max_subdivisions = 0;
  CHECK_THROWS_AS(c.validate(), PreconditionError);
  c = {};
  c.truncation_eps = 1e-8;
  CHECK(c.warnings().size() == 1);
}

TEST_CASE("truncation radius") {
  const KernelParams unit(1.0, 1.0);
  CHECK(truncation_radius(unit, 2.0 * std::exp(-2.0)) == Approx(3.0).epsilon(1e-15));
  // 1 + ln(2e12), mpmath
  CHECK(truncation_radius(unit, 1e-12) == Approx(29.3241682964884935).epsilon(1e-15));
  CHECK(truncation_radius(unit, 5.0) == 1.0);
  CHECK_THROWS_AS(truncation_radius(unit, 0.0), PreconditionError);

  // Kernel mass beyond the radius is at most eps.
  QuadratureConfig cfg;
  for (double q : {0.5, 2.0}) {
    for (double eps : {1e-3, 1e-6, 1e-9}) {
      const KernelParams p(q, 1.5);
      const double R = truncation_radius(p, eps);
      const auto tail = integrate_interval([&](double h) { return psi(p, h); }, R, R + 200.0, cfg);
      CHECK(2.0 * tail.value <= eps);
    }
  }
}

TEST_CASE("integrate_interval basics") {
  const QuadratureConfig cfg;
  CHECK(integrate_interval([](double) { return 1.0; }, 0.0, 1.0, cfg).value == 1.0);
  CHECK(std::fabs(integrate_interval([](double x) { return x; }, -2.5, 2.5, cfg).value) <= cfg.abs_tol);
  CHECK(integrate_interval([](double x) { return std::exp(x); }, 0.0, 1.0, cfg).value ==
        Approx(std::numbers::e - 1.0).epsilon(1e-14));
  CHECK(integrate_interval([](double x) { return std::sin(x); }, 0.0, std::numbers::pi, cfg).value ==
        Approx(2.0).epsilon(1e-14));
  const auto zero = integrate_interval([](double) { return 1.0; }, 1.0, 1.0, cfg);
  CHECK(zero.value == 0.0);
  CHECK(zero.converged);
  CHECK_THROWS_AS(integrate_interval([](double) { return 1.0; }, 1.0, 0.0, cfg), PreconditionError);
}

TEST_CASE("psi on [-30, 30] integrates to one") {
  const KernelParams unit(1.0, 1.0);
  const auto r = integrate_interval([&](double h) { return psi(unit, h); }, -30.0, 30.0, QuadratureConfig{});
  CHECK(r.converged);
  CHECK(r.value == Approx(1.0).margin(1e-10));
}

TEST_CASE("kinks: breakpoints make |x| exact on one panel each") {
  const QuadratureConfig cfg;
  const double bp[] = {0.0};
  const auto with = integrate_interval([](double x) { return std::fabs(x); }, -1.0, 2.0, cfg, bp);
  CHECK(with.value == Approx(2.5).epsilon(1e-15));
  CHECK(with.subdivisions_used == 0);
  const auto without = integrate_interval([](double x) { return std::fabs(x); }, -1.0, 2.0, cfg);
  CHECK(without.converged);
  CHECK(without.value == Approx(2.5).margin(1e-10));
  CHECK(without.subdivisions_used > 0);
}

TEST_CASE("monomials up to degree 10 are exact on a single panel") {
  const QuadratureConfig cfg;
  for (int d = 0; d <= 10; ++d) {
    const auto r = integrate_interval([d](double x) { return std::pow(x, d); }, 0.0, 1.0, cfg);
    CHECK(r.subdivisions_used == 0);
    CHECK(r.value == Approx(1.0 / (d + 1)).epsilon(1e-14));
  }
}

TEST_CASE("exhausted subdivision budget reports non-convergence") {
  QuadratureConfig cfg;
  cfg.max_subdivisions = 2;
  const auto r = integrate_interval([](double x) { return std::sin(1.0 / (x + 1e-3)); }, 0.0, 1.0, cfg);
  CHECK_FALSE(r.converged);
  CHECK(std::isfinite(r.value));
}

TEST_CASE("integrate_real_line") {
  const KernelParams unit(1.0, 1.0);
  const QuadratureConfig cfg;
  const RealLineDecay decay{unit};
  const auto mass = integrate_real_line([&](double h) { return psi(unit, h); }, decay, cfg);
  CHECK(mass.value == Approx(1.0).margin(1e-10));
  CHECK(mass.error_estimate >= cfg.truncation_eps);
  const auto odd = integrate_real_line([&](double h) { return h * psi(unit, h); }, decay, cfg);
  CHECK(std::fabs(odd.value) <= 1e-10);
  // |h| Psi decays like (1+|h|) Psi: use a generous constant
  const auto first = integrate_real_line([&](double h) { return std::fabs(h) * psi(unit, h); },
                                         RealLineDecay{unit, 40.0}, cfg, std::vector<double>{0.0});
  CHECK(first.value <= 5.66762223554809535);
  // mpmath: int |h| Psi = 1.46763807404132207683
  CHECK(first.value == Approx(1.46763807404132207683).epsilon(1e-9));
  CHECK_THROWS_AS(integrate_real_line([](double) { return 0.0; }, RealLineDecay{unit, -1.0}, cfg),
                  PreconditionError);
}

TEST_CASE("widening the window beyond the truncation radius changes little") {
  const KernelParams p(2.0, 0.5);
  const QuadratureConfig cfg;
  const double R = truncation_radius(p, cfg.truncation_eps);
  const auto f = [&](double h) { return psi(p, h); };
  const double a = integrate_interval(f, -R, R, cfg).value;
  const double b = integrate_interval(f, -2.0 * R, 2.0 * R, cfg).value;
  CHECK(std::fabs(a - b) <= cfg.truncation_eps + 2.0 * cfg.abs_tol);
}

TEST_CASE("determinism") {
  const KernelParams p(0.5, 2.0);
  const auto f = [&](double h) { return std::cos(h) * psi(p, h); };
  const auto a = integrate_real_line(f, RealLineDecay{p}, QuadratureConfig{});
  const auto b = integrate_real_line(f, RealLineDecay{p}, QuadratureConfig{});
  CHECK(a.value == b.value);
  CHECK(a.error_estimate == b.error_estimate);
  CHECK(a.subdivisions_used == b.subdivisions_used);
}

TEST_CASE("Gauss-Legendre rule") {
  CHECK_THROWS_AS(GaussLegendreRule(0), PreconditionError);
  for (int order : {1, 2, 5, 12, 13}) {
    const GaussLegendreRule rule(order);
    CHECK(rule.order() == order);
    double wsum = 0.0;
    for (double w : rule.weights()) wsum += w;
    CHECK(wsum == Approx(2.0).epsilon(1e-14));
    for (std::size_t i = 1; i < rule.nodes().size(); ++i) CHECK(rule.nodes()[i] > rule.nodes()[i - 1]);
    for (int d = 0; d <= 2 * order - 1; ++d) {
      const double v = rule.integrate([d](double x) { return std::pow(x, d); }, 0.0, 2.0);
      CHECK(v == Approx(std::pow(2.0, d + 1) / (d + 1)).epsilon(1e-12));
    }
  }
}
