#include "hiv/config.hpp"

#include <fstream>
#include <set>

namespace hiv {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key())) {
      throw SchemaError(where.empty() ? item.key() : where + "." + item.key(), "unknown key");
    }
  }
}

const json& require_object(const json& doc, const std::string& where) {
  if (!doc.is_object()) throw SchemaError(where.empty() ? "<root>" : where, "expected an object");
  return doc;
}

double read_number(const json& value, const std::string& field) {
  if (!value.is_number()) throw SchemaError(field, "expected a number");
  const double x = value.get<double>();
  if (!std::isfinite(x)) throw SchemaError(field, "expected a finite number");
  return x;
}

}  // namespace

ScenarioConfig default_config() { return ScenarioConfig{}; }

Integrator parse_method(const std::string& name) {
  if (name == "rk4") return Integrator::RK4;
  if (name == "euler") return Integrator::Euler;
  throw SchemaError("method", "expected \"euler\" or \"rk4\", got \"" + name + "\"");
}

SweepMode parse_mode(const std::string& name) {
  if (name == "fbsm") return SweepMode::IteratedFBSM;
  if (name == "paper") return SweepMode::PaperSinglePass;
  throw SchemaError("sweep.mode", "expected \"paper\" or \"fbsm\", got \"" + name + "\"");
}

std::string to_string(Integrator method) { return method == Integrator::RK4 ? "rk4" : "euler"; }
std::string to_string(SweepMode mode) { return mode == SweepMode::IteratedFBSM ? "fbsm" : "paper"; }

ScenarioConfig parse_config(const json& doc) {
  ScenarioConfig cfg = default_config();
  require_object(doc, "");
  reject_unknown(doc, "", {"params", "initial", "grid", "sweep", "method", "outputs"});

  if (doc.contains("params")) {
    const json& params = require_object(doc["params"], "params");
    std::set<std::string> allowed(kParamNames.begin(), kParamNames.end());
    reject_unknown(params, "params", allowed);
    for (std::size_t i = 0; i < kParamNames.size(); ++i) {
      const std::string name = kParamNames[i];
      if (params.contains(name)) param_field(cfg.params, i) = read_number(params[name], "params." + name);
    }
    try {
      validate(cfg.params);
    } catch (const DomainError& e) {
      throw SchemaError("params", e.what());
    }
  }

  if (doc.contains("initial")) {
    const json& initial = require_object(doc["initial"], "initial");
    reject_unknown(initial, "initial", {"x", "y", "v", "z", "w"});
    for (Eigen::Index k = 0; k < 5; ++k) {
      const std::string name = kCompartmentNames[k];
      if (initial.contains(name)) {
        const double value = read_number(initial[name], "initial." + name);
        if (value < 0.0) throw SchemaError("initial." + name, "must be nonnegative");
        cfg.initial[k] = value;
      }
    }
  }

  if (doc.contains("grid")) {
    const json& grid = require_object(doc["grid"], "grid");
    reject_unknown(grid, "grid", {"t0", "tf", "n"});
    if (grid.contains("t0")) cfg.grid.t0 = read_number(grid["t0"], "grid.t0");
    if (grid.contains("tf")) cfg.grid.tf = read_number(grid["tf"], "grid.tf");
    if (grid.contains("n")) {
      if (!grid["n"].is_number_integer()) throw SchemaError("grid.n", "expected an integer");
      cfg.grid.n = grid["n"].get<Eigen::Index>();
    }
    if (!(cfg.grid.tf > cfg.grid.t0)) throw SchemaError("grid.tf", "must exceed grid.t0");
    if (cfg.grid.n < 1) throw SchemaError("grid.n", "must be at least 1");
  }

  if (doc.contains("sweep")) {
    const json& sweep = require_object(doc["sweep"], "sweep");
    reject_unknown(sweep, "sweep", {"max_iters", "tol", "relaxation", "mode"});
    if (sweep.contains("max_iters")) {
      if (!sweep["max_iters"].is_number_integer()) throw SchemaError("sweep.max_iters", "expected an integer");
      cfg.sweep.max_iters = sweep["max_iters"].get<int>();
      if (cfg.sweep.max_iters < 1) throw SchemaError("sweep.max_iters", "must be positive");
    }
    if (sweep.contains("tol")) {
      cfg.sweep.tol = read_number(sweep["tol"], "sweep.tol");
      if (cfg.sweep.tol < 0.0) throw SchemaError("sweep.tol", "must be nonnegative");
    }
    if (sweep.contains("relaxation")) {
      cfg.sweep.relaxation = read_number(sweep["relaxation"], "sweep.relaxation");
      if (!(cfg.sweep.relaxation > 0.0 && cfg.sweep.relaxation <= 1.0)) {
        throw SchemaError("sweep.relaxation", "must lie in (0,1]");
      }
    }
    if (sweep.contains("mode")) {
      if (!sweep["mode"].is_string()) throw SchemaError("sweep.mode", "expected a string");
      cfg.sweep.mode = parse_mode(sweep["mode"].get<std::string>());
    }
  }

  if (doc.contains("method")) {
    if (!doc["method"].is_string()) throw SchemaError("method", "expected a string");
    cfg.method = parse_method(doc["method"].get<std::string>());
  }

  if (doc.contains("outputs")) {
    const json& outputs = require_object(doc["outputs"], "outputs");
    reject_unknown(outputs, "outputs", {"dir", "adjoints"});
    if (outputs.contains("dir")) {
      if (!outputs["dir"].is_string()) throw SchemaError("outputs.dir", "expected a string");
      cfg.outputs.dir = outputs["dir"].get<std::string>();
    }
    if (outputs.contains("adjoints")) {
      if (!outputs["adjoints"].is_boolean()) throw SchemaError("outputs.adjoints", "expected a boolean");
      cfg.outputs.adjoints = outputs["adjoints"].get<bool>();
    }
  }
  return cfg;
}

json to_json(const ScenarioConfig& cfg) {
  json params = json::object();
  for (std::size_t i = 0; i < kParamNames.size(); ++i) params[kParamNames[i]] = param_field(cfg.params, i);
  json initial = json::object();
  for (Eigen::Index k = 0; k < 5; ++k) initial[kCompartmentNames[k]] = cfg.initial[k];
  return json{
      {"params", params},
      {"initial", initial},
      {"grid", {{"t0", cfg.grid.t0}, {"tf", cfg.grid.tf}, {"n", cfg.grid.n}}},
      {"sweep",
       {{"max_iters", cfg.sweep.max_iters},
        {"tol", cfg.sweep.tol},
        {"relaxation", cfg.sweep.relaxation},
        {"mode", to_string(cfg.sweep.mode)}}},
      {"method", to_string(cfg.method)},
      {"outputs", {{"dir", cfg.outputs.dir}, {"adjoints", cfg.outputs.adjoints}}},
  };
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError("<root>", std::string("invalid JSON: ") + e.what());
  }
  return parse_config(doc);
}

}  // namespace hiv
