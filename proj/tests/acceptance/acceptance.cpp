// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <boost/math/quadrature/exp_sinh.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "actconv/analysis.hpp"

using namespace actconv;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail = what;
    pass = pass && ok;
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

const std::vector<double> kParamValues{0.5, 1.0, 2.0};

// Two-sided tail of Psi beyond t in closed form: the right tail of G_c is
// (1/(2 beta)) [ln(1 + c e^{-beta(t-1)}) - ln(1 + c e^{-beta(t+1)})], and
// the left tail of G_q is the right tail of G_{1/q}, so the two-sided tail
// of Psi is the sum of both right tails.
double closed_form_tail(const KernelParams& p, double t) {
  const double b = p.beta();
  double sum = 0.0;
  for (double c : {p.q(), 1.0 / p.q()}) {
    sum += std::log1p(c * std::exp(-b * (t - 1.0))) - std::log1p(c * std::exp(-b * (t + 1.0)));
  }
  return sum / (2.0 * b);
}

OperatorSpec make_spec(OperatorKind kind, int n, const KernelParams& p, double alpha = 0.5) {
  switch (kind) {
    case OperatorKind::Basic: return OperatorSpec::basic(n, p, alpha);
    case OperatorKind::Kantorovich: return OperatorSpec::kantorovich(n, p, alpha);
    case OperatorKind::Quadrature: return OperatorSpec::quadrature_type(uniform_weights(4), n, p, alpha);
  }
  throw std::logic_error("kind");
}

const OperatorKind kKinds[] = {OperatorKind::Basic, OperatorKind::Kantorovich, OperatorKind::Quadrature};

Outcome normalization() {
  Outcome o;
  double worst = 0.0, slowest = 0.0;
  for (double q : kParamValues) {
    for (double beta : kParamValues) {
      const KernelParams p(q, beta);
      const auto t0 = Clock::now();
      const auto mass = kernel_mass(p);
      const double elapsed = seconds_since(t0);
      worst = std::max(worst, std::fabs(mass.value - 1.0));
      slowest = std::max(slowest, elapsed);
      o.require(std::fabs(mass.value - 1.0) <= 1e-8, "q=" + num(q) + " beta=" + num(beta) + " mass " + num(mass.value));
      o.require(elapsed < 0.1, "q=" + num(q) + " beta=" + num(beta) + " took " + num(elapsed) + " s");
    }
  }
  if (o.pass) o.detail = "max |int Psi - 1| = " + num(worst) + ", slowest " + num(slowest * 1e3) + " ms";
  return o;
}

Outcome tail_bound() {
  Outcome o;
  double worst_ratio = 0.0;
  for (double q : kParamValues) {
    for (double beta : kParamValues) {
      const KernelParams p(q, beta);
      for (int n : {9, 16, 25, 36}) {
        const auto tail = kernel_tail_mass(p, n, 0.5);
        const double exact = closed_form_tail(p, std::sqrt(static_cast<double>(n)));
        const double bound = tail_mass_bound(p, n, 0.5);
        const std::string tag = "q=" + num(q) + " beta=" + num(beta) + " n=" + std::to_string(n);
        o.require(std::fabs(tail.value - exact) <= 1e-10, tag + ": quadrature tail " + num(tail.value) +
                                                              " vs closed form " + num(exact));
        o.require(tail.value <= bound, tag + ": tail " + num(tail.value) + " > bound " + num(bound));
        worst_ratio = std::max(worst_ratio, tail.value / bound);
      }
    }
  }
  const KernelParams unit(1.0, 1.0);
  const double spot = tail_mass_bound(unit, 9, 0.5);
  const double spot_tail = kernel_tail_mass(unit, 9, 0.5).value;
  o.require(std::fabs(spot - 0.270671) <= 5e-7, "spot bound " + num(spot) + " != 0.270671");
  o.require(spot_tail < spot, "spot tail not strictly below bound");
  if (o.pass) {
    o.detail = "spot bound " + num(spot) + ", tail " + num(spot_tail) + ", max tail/bound " + num(worst_ratio);
  }
  return o;
}

Outcome moments() {
  Outcome o;
  boost::math::quadrature::exp_sinh<double> half_line;
  double worst_ratio = 0.0;
  for (double q : kParamValues) {
    for (double beta : kParamValues) {
      const KernelParams p(q, beta);
      for (int k = 1; k <= 5; ++k) {
        const double m = kernel_absolute_moment(p, k).value;
        const auto weighted = [&](double h) {
          const double w = psi_unchecked(p, h);
          return w == 0.0 ? 0.0 : std::pow(h, k) * w;
        };
        const double oracle = 2.0 * half_line.integrate(weighted, 1e-13);
        const double bound = moment_bound(p, k);
        const std::string tag = "q=" + num(q) + " beta=" + num(beta) + " k=" + std::to_string(k);
        o.require(std::fabs(m - oracle) <= 1e-8 * std::max(1.0, oracle),
                  tag + ": moment " + num(m) + " vs exp-sinh " + num(oracle));
        o.require(m <= bound, tag + ": moment " + num(m) + " > bound " + num(bound));
        worst_ratio = std::max(worst_ratio, m / bound);
      }
    }
  }
  if (o.pass) o.detail = "max moment/bound " + num(worst_ratio);
  return o;
}

Outcome jackson_sweep() {
  Outcome o;
  const auto t0 = Clock::now();
  const KernelParams p(1.0, 1.0);
  const auto grid = MeasurementGrid::uniform(-3.0, 3.0, 2001);
  const std::vector<int> ns{9, 16, 25, 36, 49};
  int checked = 0;
  double worst_ratio = 0.0;
  for (const TestFunction& f : {catalog::sine(), catalog::cosine(), catalog::clamped_abs(), catalog::gaussian()}) {
    for (auto kind : kKinds) {
      for (const auto& r : run_convergence_sweep(f, make_spec(kind, 9, p), ns, grid)) {
        const std::string tag = f.name + "/" + std::string(to_string(kind)) + "/n=" + std::to_string(r.n);
        o.require(r.error.empty(), tag + ": " + r.error);
        o.require(r.hypothesis_met && r.omega_closed_form, tag + ": bound not applicable");
        o.require(r.satisfied, tag + ": error " + num(r.measured_sup_error) + " > bound " + num(r.bound_value));
        worst_ratio = std::max(worst_ratio, r.measured_sup_error / r.bound_value);
        ++checked;
      }
    }
  }
  const double elapsed = seconds_since(t0);
  o.require(elapsed < 120.0, "sweep took " + num(elapsed) + " s");
  if (o.pass) {
    o.detail = std::to_string(checked) + " records, max error/bound " + num(worst_ratio) + ", " + num(elapsed) + " s";
  }
  return o;
}

Outcome identity_facts() {
  Outcome o;
  const KernelParams p(1.0, 1.0);
  const auto one = catalog::constant(1.0);
  const auto id = catalog::identity();
  double worst = 0.0;
  for (int n : {9, 16, 32}) {
    for (auto kind : kKinds) {
      const auto spec = make_spec(kind, n, p);
      for (double x : uniform_nodes(21, -3.0, 3.0)) {
        const std::string tag = std::string(to_string(kind)) + " n=" + std::to_string(n) + " x=" + num(x);
        const double e1 = std::fabs(apply(one, spec, x) - 1.0);
        o.require(e1 <= 1e-9, tag + ": B(1) off by " + num(e1));
        worst = std::max(worst, e1);
        if (kind == OperatorKind::Quadrature) continue;
        const double shift = kind == OperatorKind::Kantorovich ? 1.0 / (2.0 * n) : 0.0;
        const double e2 = std::fabs(apply(id, spec, x) - (x + shift));
        o.require(e2 <= 1e-9, tag + ": B(id) off by " + num(e2));
        worst = std::max(worst, e2);
      }
    }
  }
  if (o.pass) o.detail = "max deviation " + num(worst);
  return o;
}

Outcome smoothness() {
  Outcome o;
  const KernelParams p(1.0, 1.0);
  const auto grid = MeasurementGrid::uniform(-3.0, 3.0, 2001);
  const std::vector<double> thetas{0.05, 0.1, 0.5};
  int checked = 0;
  for (const auto& name : catalog::names()) {
    const TestFunction f = *catalog::by_name(name);
    for (auto kind : kKinds) {
      for (int n : {9, 25}) {
        for (const auto& r : check_smoothness_preservation(f, make_spec(kind, n, p), thetas, grid)) {
          o.require(r.satisfied, name + "/" + std::string(to_string(kind)) + "/n=" + std::to_string(n) +
                                     " theta=" + num(r.theta) + ": " + num(r.omega_Bf) + " > " + num(r.omega_f));
          ++checked;
        }
      }
    }
  }
  if (o.pass) o.detail = std::to_string(checked) + " (f, kind, n, theta) checks";
  return o;
}

Outcome derivative_commuting() {
  Outcome o;
  const KernelParams p(1.0, 1.0);
  const auto sine = catalog::sine();
  const auto cosine = catalog::cosine();
  constexpr double step = 1e-4;
  double worst = 0.0;
  for (auto kind : kKinds) {
    const auto spec = make_spec(kind, 32, p);
    for (double x : uniform_nodes(21, -2.0, 2.0)) {
      const double fd = (apply(sine, spec, x + step) - apply(sine, spec, x - step)) / (2.0 * step);
      const double exact = apply(cosine, spec, x);
      const double e = std::fabs(fd - exact);
      worst = std::max(worst, e);
      o.require(e <= 1e-6, std::string(to_string(kind)) + " x=" + num(x) + ": mismatch " + num(e));
    }
  }
  if (o.pass) o.detail = "max |FD - B(cos)| = " + num(worst);
  return o;
}

Outcome taylor() {
  Outcome o;
  const KernelParams p(1.0, 1.0);
  const auto grid = MeasurementGrid::uniform(-3.0, 3.0, 2001);
  const auto sine = catalog::sine();
  double worst_ratio = 0.0, worst_odd = 0.0;
  for (auto kind : kKinds) {
    for (int n : {16, 25, 36}) {
      const auto spec = make_spec(kind, n, p);
      for (int N : {1, 2}) {
        const auto r = measure_taylor_residual(sine, spec, N, grid);
        o.require(r.satisfied, std::string(to_string(kind)) + " n=" + std::to_string(n) + " N=" + std::to_string(N) +
                                   ": residual " + num(r.residual) + " > bound " + num(r.bound_value));
        worst_ratio = std::max(worst_ratio, r.residual / r.bound_value);
      }
      if (kind == OperatorKind::Basic) {
        for (int k : {1, 3, 5}) {
          const double m = std::fabs(central_moment(spec, 0.0, k));
          worst_odd = std::max(worst_odd, m);
          o.require(m <= 1e-12, "basic n=" + std::to_string(n) + " moment k=" + std::to_string(k) + " = " + num(m));
        }
      }
    }
  }
  if (o.pass) o.detail = "max residual/bound " + num(worst_ratio) + ", max |odd moment| " + num(worst_odd);
  return o;
}

Outcome iterated() {
  Outcome o;
  const KernelParams p(1.0, 1.0);
  const auto grid = MeasurementGrid::uniform(-3.0, 3.0, 2001);
  const auto sine = catalog::sine();
  const ApproximantOptions opts{};
  constexpr int nodes = 65;
  std::ostringstream info;
  for (auto kind : kKinds) {
    const auto proto = make_spec(kind, 32, p);
    const std::vector<int> triple{32, 32, 32};
    const auto r = measure_chain(sine, proto, triple, grid, nodes, opts);
    const double single = r.single_error_sum / 3.0;
    const double rhs = 3.0 * single + 3.0 * opts.residual_ceiling;
    const std::string kname(to_string(kind));
    o.require(r.chain_error <= rhs, kname + " B^3: " + num(r.chain_error) + " > " + num(rhs));

    const std::vector<int> mixed{9, 16, 25};
    const auto m = measure_chain(sine, proto, mixed, grid, nodes, opts);
    o.require(std::isfinite(m.bound_sum), kname + " chain: per-step bounds not applicable");
    o.require(m.chain_error <= m.bound_sum, kname + " chain: " + num(m.chain_error) + " > sum " + num(m.bound_sum));
    o.require(m.bound_sum <= m.bound_coarse, kname + " chain: sum bound above r*bound(k1)");
    info << kname << ' ' << num(r.chain_error) << "<=" << num(rhs) << "; ";
  }
  if (o.pass) o.detail = info.str();
  return o;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Outcome determinism() {
  Outcome o;
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / ("actconv-determinism-" + std::to_string(::getpid()));
  fs::remove_all(root);
  const fs::path a = root / "a", b = root / "b";
  for (const auto& dir : {a, b}) {
    const std::string cmd = std::string("\"") + ACTCONV_EXE + "\" approx --out \"" + dir.string() + "\" > \"" +
                            (root / "log.txt").string() + "\" 2>&1";
    fs::create_directories(root);
    const int status = std::system(cmd.c_str());
    o.require(status == 0, "actconv approx exited with status " + std::to_string(status));
  }
  int compared = 0;
  if (o.pass) {
    for (const auto& entry : fs::directory_iterator(a)) {
      if (entry.path().extension() != ".csv") continue;
      const fs::path other = b / entry.path().filename();
      o.require(fs::exists(other), "missing " + other.string());
      o.require(read_file(entry.path()) == read_file(other), entry.path().filename().string() + " differs");
      ++compared;
    }
    std::size_t in_b = 0;
    for (const auto& entry : fs::directory_iterator(b)) in_b += entry.path().extension() == ".csv";
    o.require(compared > 0 && in_b == static_cast<std::size_t>(compared), "CSV file sets differ or are empty");
  }
  fs::remove_all(root);
  if (o.pass) o.detail = std::to_string(compared) + " CSV files byte-identical";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"kernel normalization", normalization},
      {"tail mass bound", tail_bound},
      {"absolute moment bound", moments},
      {"Jackson-type sweep", jackson_sweep},
      {"identity reproduction", identity_facts},
      {"smoothness preservation", smoothness},
      {"derivative commuting", derivative_commuting},
      {"Taylor residuals", taylor},
      {"iterated bounds", iterated},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failed += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS" : "FAIL") << " [" << (i + 1) << "] " << criteria[i].first << ": " << o.detail
              << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
