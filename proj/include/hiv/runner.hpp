#ifndef HIV_RUNNER_HPP
#define HIV_RUNNER_HPP

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "hiv/analysis.hpp"
#include "hiv/config.hpp"

namespace hiv {

/// Process exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitSchema = 2, kExitNumeric = 3, kExitIo = 4 };

/// Shortest decimal string that parses back to the same double.
std::string format_double(double value);

/// Header t,x,y,v,z,w then u1,u2 when controls are present and l1..l5 when
/// `with_adjoints` is set and adjoints are present. LF line endings.
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory, bool with_adjoints = false);

struct Artifact {
  std::string filename;
  std::string content;
};

/// Files produced by one subcommand. `numeric_failure` marks a completed run whose
/// result is not trustworthy (blow-up, non-convergence); the artifacts are still written.
struct RunOutput {
  std::vector<Artifact> artifacts;
  bool numeric_failure = false;
  std::string message;

  const Artifact& artifact(const std::string& filename) const;
};

/// Untreated trajectory: trajectory.csv.
RunOutput run_simulate(const ScenarioConfig& cfg);

/// All five steady states with thresholds, coordinates, verdicts and eigenvalues: equilibria.json.
/// A singular denominator is reported on the affected entry only.
RunOutput run_equilibria(const ScenarioConfig& cfg);

/// Compact per-equilibrium verdict table (threshold verdict, spectrum verdict, leading real part): stability.json.
RunOutput run_stability(const ScenarioConfig& cfg);

/// Optimal schedule: optimal_trajectory.csv and optimal_summary.json with objective,
/// iterations, converged, final_delta and objective_uncontrolled.
RunOutput run_optimize(const ScenarioConfig& cfg);

/// One sweep.csv row per value of `axis`: the value, the five thresholds, then
/// existence and verdict for each steady state. Unknown axis is a SchemaError.
RunOutput run_sweep(const ScenarioConfig& cfg, const std::string& axis, const std::vector<double>& values);

/// Creates `dir` if needed and writes every artifact; IoError on failure.
void write_artifacts(const RunOutput& output, const std::filesystem::path& dir);

/// JSON rendering of a report (shared by the equilibria and stability outputs).
nlohmann::json report_to_json(const EquilibriumReport& report);

}  // namespace hiv

#endif  // HIV_RUNNER_HPP
