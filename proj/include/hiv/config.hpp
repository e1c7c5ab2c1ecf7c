#ifndef HIV_CONFIG_HPP
#define HIV_CONFIG_HPP

#include <filesystem>
#include <string>

#include "json.hpp"

#include "hiv/control.hpp"
#include "hiv/model.hpp"
#include "hiv/simulate.hpp"

namespace hiv {

struct OutputOptions {
  std::string dir = ".";
  bool adjoints = false;  ///< add l1..l5 columns to the optimize trajectory

  bool operator==(const OutputOptions&) const = default;
};

/**
 * One scenario document:
 *
 *   {
 *     "params":  {"lambda": 1, "d": 0.1, ..., "A1": 250, "A2": 2500},
 *     "initial": {"x": 5, "y": 1, "v": 1, "z": 2, "w": 1},
 *     "grid":    {"t0": 0, "tf": 100, "n": 10000},
 *     "sweep":   {"max_iters": 200, "tol": 1e-4, "relaxation": 0.5, "mode": "fbsm"},
 *     "method":  "rk4",
 *     "outputs": {"dir": ".", "adjoints": false}
 *   }
 *
 * Every key is optional and falls back to default_config(). Unknown keys are rejected.
 */
struct ScenarioConfig {
  Params params = reference_parameters();
  State initial = reference_initial_state();
  TimeGrid grid{0.0, 100.0, 10000};
  SweepConfig sweep;
  Integrator method = Integrator::RK4;
  OutputOptions outputs;

  bool operator==(const ScenarioConfig& other) const {
    return params == other.params && initial == other.initial && grid == other.grid && sweep == other.sweep &&
           method == other.method && outputs == other.outputs;
  }
};

ScenarioConfig default_config();

/// Throws SchemaError naming the offending field (e.g. "params.beta").
ScenarioConfig parse_config(const nlohmann::json& doc);
nlohmann::json to_json(const ScenarioConfig& cfg);

/// Reads and parses a config file; IoError if unreadable, SchemaError if malformed.
ScenarioConfig load_config(const std::filesystem::path& path);

Integrator parse_method(const std::string& name);
SweepMode parse_mode(const std::string& name);
std::string to_string(Integrator method);
std::string to_string(SweepMode mode);

}  // namespace hiv

#endif  // HIV_CONFIG_HPP
