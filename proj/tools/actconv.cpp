// actconv: kernel checks, convergence sweeps, Taylor residuals and iterated
// operators, written out as CSV/JSON tables and SVG plots.

#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "actconv/cli/commands.hpp"

namespace {

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? "," : "") + parts[i];
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace actconv::cli;

  CLI::App app{"Convolution operators built on the symmetrized q-deformed half hyperbolic tangent density"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  app.add_option("--config", config_path, "key = value config file ([section] headers allowed)");

  // Flag name -> collected raw values; applied after the config file.
  std::map<std::string, std::vector<std::string>> raw;
  const std::vector<std::pair<std::string, std::string>> flags = {
      {"q", "deformation parameter q > 0"},
      {"beta", "steepness beta > 0"},
      {"alpha", "rate exponent, 0 < alpha < 1"},
      {"n", "resolution (repeatable or comma separated)"},
      {"kind", "basic, kantorovich or quadrature (repeatable)"},
      {"weights", "quadrature weights w1,...,wr"},
      {"fn", "catalog function: sin, cos, abs, gauss, id, const (repeatable)"},
      {"domain", "measurement interval a,b"},
      {"grid-points", "measurement grid size"},
      {"out", "output directory (default: $ACTCONV_OUT, else actconv-out)"},
      {"format", "subset of csv,json,svg"},
      {"quad-tol", "quadrature tolerance (absolute and relative)"},
      {"nodes", "approximant nodes for iterated operators"},
      {"taylor-order", "Taylor order N >= 1"},
      {"iterations", "iteration count r"},
      {"chain", "mixed chain k1,k2,... (non-decreasing)"},
  };
  for (const auto& [name, help] : flags) {
    app.add_option("--" + name, raw[name], help)->allow_extra_args(false);
  }

  std::map<std::string, int (*)(const RunConfig&, std::ostream&)> verbs = {
      {"kernel-check", &cmd_kernel_check}, {"approx", &cmd_approx}, {"taylor", &cmd_taylor},
      {"iterate", &cmd_iterate},           {"report", &cmd_report},
  };
  const std::map<std::string, std::string> verb_help = {
      {"kernel-check", "kernel normalization, symmetry, maximum, tail mass and moments"},
      {"approx", "sup-error sweeps against the Jackson-type estimates"},
      {"taylor", "Taylor-corrected residuals against the higher-order estimates"},
      {"iterate", "iterated and mixed-chain operators"},
      {"report", "index of the JSON summaries in the output directory"},
  };
  for (const auto& [name, help] : verb_help) app.add_subcommand(name, help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitConfig;
  }

  RunConfig config;
  try {
    apply_environment(config);
    if (!config_path.empty()) apply_config_file(config, config_path);
    for (const auto& [name, values] : raw) {
      if (!values.empty()) set_field(config, name, join(values));
    }
    validate(config);
  } catch (const std::exception& e) {
    std::cerr << "actconv: " << e.what() << '\n';
    return kExitConfig;
  }

  const std::string verb = app.get_subcommands().front()->get_name();
  try {
    const int status = verbs.at(verb)(config, std::cout);
    if (status != kExitOk) std::cerr << "actconv " << verb << ": at least one check failed\n";
    return status;
  } catch (const OutputError& e) {
    std::cerr << "actconv " << verb << ": " << e.what() << '\n';
    return kExitIo;
  } catch (const actconv::PreconditionError& e) {
    std::cerr << "actconv " << verb << ": " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "actconv " << verb << ": " << e.what() << '\n';
    return kExitCheckFailed;
  }
}
