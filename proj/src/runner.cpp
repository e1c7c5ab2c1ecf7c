#include "hiv/runner.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace hiv {

using nlohmann::json;

std::string format_double(double value) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, result.ptr);
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory, bool with_adjoints) {
  const bool controls = trajectory.controls.has_value();
  const bool adjoints = with_adjoints && trajectory.adjoints.has_value();
  out << "t,x,y,v,z,w";
  if (controls) out << ",u1,u2";
  if (adjoints) out << ",l1,l2,l3,l4,l5";
  out << '\n';
  for (Eigen::Index i = 0; i < trajectory.samples(); ++i) {
    out << format_double(trajectory.grid.time(i));
    for (Eigen::Index k = 0; k < 5; ++k) out << ',' << format_double(trajectory.states(k, i));
    if (controls) out << ',' << format_double((*trajectory.controls)(0, i)) << ','
                      << format_double((*trajectory.controls)(1, i));
    if (adjoints) {
      for (Eigen::Index k = 0; k < 5; ++k) out << ',' << format_double((*trajectory.adjoints)(k, i));
    }
    out << '\n';
  }
}

const Artifact& RunOutput::artifact(const std::string& filename) const {
  for (const Artifact& a : artifacts) {
    if (a.filename == filename) return a;
  }
  throw ContractError("no artifact named " + filename);
}

namespace {

json thresholds_to_json(const Thresholds& t) {
  // NaN (undefined threshold) serializes as null.
  return json{{"r0", t.r0}, {"rCtl", t.rCtl}, {"rW", t.rW}, {"rCtlW1", t.rCtlW1}, {"rCtlW2", t.rCtlW2}};
}

json point_to_json(const State& s) {
  json point = json::object();
  for (Eigen::Index k = 0; k < 5; ++k) point[kCompartmentNames[k]] = s[k];
  return point;
}

// Existence and verdicts for one parameter set; singular denominators become
// non-existent entries with the error as reason.
std::vector<EquilibriumReport> lenient_equilibria(const Params& p) {
  std::vector<EquilibriumReport> reports;
  for (EquilibriumLabel label : kAllEquilibria) {
    EquilibriumReport report;
    try {
      report = classify_stability(p, equilibrium(p, label));
    } catch (const SingularParameterError& e) {
      report = EquilibriumReport{};
      report.label = label;
      report.thresholds = thresholds_unchecked(p);
      report.reason = e.what();
    }
    reports.push_back(std::move(report));
  }
  return reports;
}

std::string csv_string(const Trajectory& trajectory, bool with_adjoints) {
  std::ostringstream out;
  write_trajectory_csv(out, trajectory, with_adjoints);
  return out.str();
}

}  // namespace

json report_to_json(const EquilibriumReport& report) {
  json eigenvalues = json::array();
  if (report.exists) {
    for (Eigen::Index i = 0; i < report.eigenvalues.size(); ++i) {
      eigenvalues.push_back({{"re", report.eigenvalues[i].real()}, {"im", report.eigenvalues[i].imag()}});
    }
  }
  json out{{"label", to_string(report.label)},
           {"exists", report.exists},
           {"point", point_to_json(report.point)},
           {"stability", to_string(report.stability)},
           {"analytic", report.analytic ? json(to_string(*report.analytic)) : json(nullptr)},
           {"eigenvalues", eigenvalues},
           {"thresholds", thresholds_to_json(report.thresholds)}};
  if (!report.reason.empty()) out["reason"] = report.reason;
  return out;
}

RunOutput run_simulate(const ScenarioConfig& cfg) {
  const SimulationResult run = integrate(cfg.params, cfg.initial, cfg.grid, std::nullopt, cfg.method);
  RunOutput output;
  output.artifacts.push_back({"trajectory.csv", csv_string(run.trajectory, false)});
  if (run.monitor.blowup) {
    output.numeric_failure = true;
    output.message = "state blow-up at step " + std::to_string(run.monitor.blowup_step);
  } else if (run.monitor.negative_samples > 0 || run.monitor.bound_violations > 0) {
    output.message = "monitor: " + std::to_string(run.monitor.negative_samples) + " negative samples, " +
                     std::to_string(run.monitor.bound_violations) + " bound violations";
  }
  return output;
}

RunOutput run_equilibria(const ScenarioConfig& cfg) {
  json doc{{"thresholds", thresholds_to_json(thresholds_unchecked(cfg.params))}, {"equilibria", json::array()}};
  for (const EquilibriumReport& report : lenient_equilibria(cfg.params)) {
    doc["equilibria"].push_back(report_to_json(report));
  }
  RunOutput output;
  output.artifacts.push_back({"equilibria.json", doc.dump(2) + "\n"});
  return output;
}

RunOutput run_stability(const ScenarioConfig& cfg) {
  json rows = json::array();
  for (const EquilibriumReport& report : lenient_equilibria(cfg.params)) {
    json row{{"label", to_string(report.label)},
             {"exists", report.exists},
             {"stability", to_string(report.stability)},
             {"analytic", report.analytic ? json(to_string(*report.analytic)) : json(nullptr)}};
    if (report.exists) row["max_real_part"] = report.eigenvalues.real().maxCoeff();
    rows.push_back(row);
  }
  RunOutput output;
  output.artifacts.push_back({"stability.json", json{{"stability", rows}}.dump(2) + "\n"});
  return output;
}

RunOutput run_optimize(const ScenarioConfig& cfg) {
  RunOutput output;
  const SweepSolution sol = solve(cfg.params, cfg.initial, cfg.grid, cfg.sweep, cfg.method);

  const Integrator baseline_method = cfg.sweep.mode == SweepMode::PaperSinglePass ? Integrator::Euler : cfg.method;
  const ControlSchedule zero = ControlSchedule::Zero(2, cfg.grid.nodes());
  const SimulationResult baseline = integrate(cfg.params, cfg.initial, cfg.grid, zero, baseline_method);
  const double objective_uncontrolled = objective_value(cfg.params, baseline.trajectory);

  const ControlSchedule& u = *sol.trajectory.controls;
  const Eigen::Index last = sol.trajectory.samples() - 1;
  json summary{{"objective", sol.objective},
               {"objective_uncontrolled", objective_uncontrolled},
               {"iterations", sol.iterations},
               {"converged", sol.converged},
               {"final_delta", sol.final_delta},
               {"mode", to_string(cfg.sweep.mode)},
               {"method", to_string(baseline_method)},
               {"mean_u1", u.row(0).mean()},
               {"mean_u2", u.row(1).mean()},
               {"final_viral_load", sol.trajectory.states(kV, last)},
               {"final_viral_load_uncontrolled", baseline.trajectory.states(kV, baseline.trajectory.samples() - 1)}};

  output.artifacts.push_back({"optimal_trajectory.csv", csv_string(sol.trajectory, cfg.outputs.adjoints)});
  output.artifacts.push_back({"optimal_summary.json", summary.dump(2) + "\n"});
  if (!sol.converged) {
    output.numeric_failure = true;
    output.message = "sweep did not converge in " + std::to_string(sol.iterations) +
                     " iterations (final_delta = " + format_double(sol.final_delta) + ")";
  }
  return output;
}

RunOutput run_sweep(const ScenarioConfig& cfg, const std::string& axis, const std::vector<double>& values) {
  const int index = param_index(axis);
  if (index < 0) throw SchemaError("axis", "unknown parameter \"" + axis + "\"");

  std::ostringstream out;
  out << axis << ",r0,rCtl,rW,rCtlW1,rCtlW2";
  for (EquilibriumLabel label : kAllEquilibria) out << ',' << to_string(label) << "_exists," << to_string(label) << "_stability";
  out << '\n';

  for (double value : values) {
    Params p = cfg.params;
    param_field(p, static_cast<std::size_t>(index)) = value;
    try {
      validate(p);
    } catch (const DomainError& e) {
      throw SchemaError("values", e.what());
    }
    const Thresholds t = thresholds_unchecked(p);
    out << format_double(value) << ',' << format_double(t.r0) << ',' << format_double(t.rCtl) << ','
        << format_double(t.rW) << ',' << format_double(t.rCtlW1) << ',' << format_double(t.rCtlW2);
    for (const EquilibriumReport& report : lenient_equilibria(p)) {
      out << ',' << (report.exists ? 1 : 0) << ',' << to_string(report.stability);
    }
    out << '\n';
  }
  RunOutput output;
  output.artifacts.push_back({"sweep.csv", out.str()});
  return output;
}

void write_artifacts(const RunOutput& output, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  for (const Artifact& a : output.artifacts) {
    const std::filesystem::path path = dir / a.filename;
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw IoError("cannot open " + path.string() + " for writing");
    file << a.content;
    file.flush();
    if (!file) throw IoError("failed writing " + path.string());
  }
}

}  // namespace hiv
