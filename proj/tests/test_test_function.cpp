#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "actconv/approximant.hpp"
#include "actconv/test_function.hpp"

using namespace actconv;
using Catch::Approx;

namespace {
// Brute-force omega on a fine grid; a lower estimate of the true modulus.
double dense_modulus(const TestFunction& f, double theta, double a, double b, int steps_per_theta = 100) {
  const double h = theta / steps_per_theta;
  std::vector<double> v;
  for (double x = a; x <= b; x += h) v.push_back(f(x));
  double best = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    for (std::size_t j = i + 1; j < v.size() && j <= i + static_cast<std::size_t>(steps_per_theta); ++j) {
      best = std::max(best, std::fabs(v[i] - v[j]));
    }
  }
  return best;
}
}  // namespace

TEST_CASE("catalog names resolve") {
  for (const auto& name : catalog::names()) {
    const auto f = catalog::by_name(name);
    REQUIRE(f.has_value());
    CHECK(f->name == name);
  }
  CHECK_FALSE(catalog::by_name("nope").has_value());
}

TEST_CASE("catalog data is consistent with the evaluators") {
  const auto pts = uniform_nodes(301, -6.0, 6.0);
  for (const auto& name : catalog::names()) {
    const auto f = *catalog::by_name(name);
    INFO(name);
    CHECK(validate_test_function(f, pts).empty());
  }
}

TEST_CASE("sup norms") {
  CHECK(catalog::sine().sup_norm == 1.0);
  CHECK(catalog::cosine().sup_norm == 1.0);
  CHECK(catalog::gaussian().sup_norm == 1.0);
  CHECK(catalog::clamped_abs().sup_norm == 3.0);
  CHECK(catalog::constant(-2.5).sup_norm == 2.5);
  CHECK_FALSE(catalog::identity().bounded());
}

TEST_CASE("closed-form moduli dominate a dense brute force and are tight") {
  for (const auto& name : {"sin", "cos", "abs", "gauss", "id"}) {
    const auto f = *catalog::by_name(name);
    INFO(name);
    REQUIRE(f.has_modulus());
    for (double theta : {0.01, 0.1, 0.5, 1.0, 2.0}) {
      INFO(theta);
      const double brute = dense_modulus(f, theta, -5.0, 5.0);
      CHECK(brute <= f.modulus(theta) + 1e-9);
      CHECK(brute >= f.modulus(theta) - 1e-3 * theta);
    }
  }
  CHECK(catalog::sine().modulus(0.1) == Approx(0.0999583385413566631).epsilon(1e-15));
  CHECK(catalog::sine().modulus(10.0) == 2.0);
  CHECK(catalog::constant(4.0).modulus(0.3) == 0.0);
}

TEST_CASE("derivative moduli are upper bounds") {
  const auto gauss = catalog::gaussian();
  REQUIRE(gauss.derivative_count() == 2);
  for (int k = 1; k <= 2; ++k) {
    const auto& d = gauss.derivative(k);
    REQUIRE(d.has_modulus());
    for (double theta : {0.05, 0.2, 1.0}) CHECK(dense_modulus(d, theta, -6.0, 6.0) <= d.modulus(theta) + 1e-12);
  }
  const auto sine = catalog::sine();
  for (int k = 1; k <= sine.derivative_count(); ++k) {
    CHECK(dense_modulus(sine.derivative(k), 0.3, -7.0, 7.0) <= sine.derivative(k).modulus(0.3) + 1e-12);
  }
}

TEST_CASE("derivative access") {
  const auto sine = catalog::sine();
  CHECK(&sine.derivative(0) == &sine);
  CHECK(sine.derivative(1)(0.4) == Approx(std::cos(0.4)));
  CHECK(sine.derivative(2)(0.4) == Approx(-std::sin(0.4)));
  CHECK_THROWS_AS(catalog::clamped_abs().derivative(1), PreconditionError);
  CHECK_THROWS_AS(sine.derivative(-1), PreconditionError);
}

TEST_CASE("clamped abs") {
  const auto f = catalog::clamped_abs();
  CHECK(f(-2.0) == 2.0);
  CHECK(f(5.0) == 3.0);
  CHECK(f.kinks == std::vector<double>{-3.0, 0.0, 3.0});
}

TEST_CASE("validation reports inconsistent data") {
  auto f = catalog::sine();
  f.sup_norm = 0.5;
  const auto pts = uniform_nodes(50, -3.0, 3.0);
  CHECK_FALSE(validate_test_function(f, pts).empty());
  auto g = catalog::sine();
  g.derivatives[0].eval = [](double x) { return std::sin(x); };
  CHECK_FALSE(validate_test_function(g, pts).empty());
}

TEST_CASE("centered power") {
  const auto p = catalog::centered_power(0.5, 3);
  CHECK(p(1.5) == Approx(1.0));
  CHECK(p(0.0) == Approx(-0.125));
}
