// hivctl: command-line front end for the HIV treatment model.
//
//   hivctl simulate|equilibria|stability|optimize|sweep --config <path> [--out <dir>]
//          [--method euler|rk4] [--mode paper|fbsm]
//   hivctl sweep ... --axis <param> --values v1,v2,...
//
// Exit codes: 0 success, 2 schema error, 3 numeric failure or non-convergence, 4 I/O error.
// HIVCTL_SEED is reserved; nothing in the tool is stochastic.

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "hiv/runner.hpp"

namespace {

struct Options {
  std::string config;
  std::string out;
  std::string method;
  std::string mode;
  std::string axis;
  std::vector<double> values;
};

hiv::ScenarioConfig resolve_config(const Options& opt) {
  hiv::ScenarioConfig cfg = opt.config.empty() ? hiv::default_config() : hiv::load_config(opt.config);
  if (!opt.method.empty()) cfg.method = hiv::parse_method(opt.method);
  if (!opt.mode.empty()) cfg.sweep.mode = hiv::parse_mode(opt.mode);
  if (!opt.out.empty()) cfg.outputs.dir = opt.out;
  return cfg;
}

int execute(const std::string& command, const Options& opt) {
  const hiv::ScenarioConfig cfg = resolve_config(opt);
  hiv::RunOutput output;
  if (command == "simulate") {
    output = hiv::run_simulate(cfg);
  } else if (command == "equilibria") {
    output = hiv::run_equilibria(cfg);
  } else if (command == "stability") {
    output = hiv::run_stability(cfg);
  } else if (command == "optimize") {
    output = hiv::run_optimize(cfg);
  } else {
    if (opt.axis.empty()) throw hiv::SchemaError("axis", "sweep needs --axis");
    output = hiv::run_sweep(cfg, opt.axis, opt.values);
  }
  hiv::write_artifacts(output, cfg.outputs.dir);
  for (const hiv::Artifact& a : output.artifacts) std::cout << (std::filesystem::path(cfg.outputs.dir) / a.filename).string() << '\n';
  if (!output.message.empty()) std::cerr << output.message << '\n';
  return output.numeric_failure ? hiv::kExitNumeric : hiv::kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Five-compartment HIV model: steady states, stability, simulation and optimal two-drug therapy"};
  app.require_subcommand(1);
  Options opt;

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"simulate", "Untreated trajectory as CSV"},
      {"equilibria", "Steady states, thresholds and eigenvalues as JSON"},
      {"stability", "Per-equilibrium stability verdicts as JSON"},
      {"optimize", "Optimal treatment schedule (CSV) and summary (JSON)"},
      {"sweep", "Thresholds and verdicts over one parameter axis (CSV)"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opt.config, "Scenario JSON (defaults to the reference scenario)");
    sub->add_option("--out", opt.out, "Output directory (overrides outputs.dir)");
    sub->add_option("--method", opt.method, "Integrator")->check(CLI::IsMember({"euler", "rk4"}));
    sub->add_option("--mode", opt.mode, "Sweep mode for optimize")->check(CLI::IsMember({"paper", "fbsm"}));
    if (name == "sweep") {
      sub->add_option("--axis", opt.axis, "Parameter to vary (lambda, d, beta, a, p, mu, N, q, c, h, g, alpha, A1, A2)")
          ->required();
      sub->add_option("--values", opt.values, "Comma-separated parameter values")->delimiter(',')->required();
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? hiv::kExitOk : hiv::kExitSchema;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    return execute(command, opt);
  } catch (const hiv::SchemaError& e) {
    std::cerr << "schema error: " << e.what() << '\n';
    return hiv::kExitSchema;
  } catch (const hiv::DomainError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return hiv::kExitSchema;
  } catch (const hiv::IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return hiv::kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return hiv::kExitNumeric;
  }
}
