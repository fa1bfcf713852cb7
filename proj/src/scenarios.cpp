#include <map>
#include <string>

#include "meanreflect/cli.hpp"
#include "meanreflect/errors.hpp"

namespace meanreflect::cli {

namespace {

// Shipped scenario registry. The files under scenarios/ mirror these configs
// one-to-one (checked by the test suite).
const std::map<std::string, const char*>& registry() {
    static const std::map<std::string, const char*> reg = {
        {"sp_demo", R"({
  "command": "sp",
  "y": {"segments": [{"from": 0, "to": 3, "value": 0}],
        "jumps": [{"at": 1, "to_value": 2}, {"at": 2, "to_value": -1}]},
  "l": 0,
  "u": 1,
  "steps": 1,
  "horizon": 2,
  "budget_seconds": 10
})"},
        {"mean_sp_demo", R"({
  "command": "mean-sp",
  "h": {"name": "soft", "beta": 0.5},
  "y_base": {"start": 1, "slope": -0.5},
  "y_noise": {"offset": 0.4, "brownian": 0.3},
  "l": 0,
  "u": 2,
  "particles": 2000,
  "steps": 100,
  "horizon": 2,
  "budget_seconds": 60
})"},
        {"drift_floor", R"({
  "command": "simulate",
  "f": {"kind": "zero"},
  "g": {"kind": "constant", "a": -1},
  "driver": {"name": "clock"},
  "h": {"name": "identity"},
  "l": 0,
  "u": "none",
  "x0": {"kind": "constant", "a": 1},
  "particles": 1000,
  "steps": 200,
  "horizon": 2,
  "budget_seconds": 60
})"},
        {"brownian_floor", R"({
  "command": "simulate",
  "f": {"kind": "constant", "a": 0.5},
  "g": {"kind": "zero"},
  "driver": {"name": "brownian", "scale": 1},
  "h": {"name": "identity"},
  "l": {"start": 1, "slope": 0.5},
  "u": "none",
  "x0": {"kind": "constant", "a": 1},
  "particles": 20000,
  "steps": 200,
  "horizon": 2,
  "budget_seconds": 120
})"},
        {"smooth_brownian", R"({
  "command": "simulate",
  "f": {"kind": "constant", "a": 0.5},
  "g": {"kind": "ramp", "a": -0.6},
  "driver": {"name": "pii", "scale": 1, "clock": true},
  "h": {"name": "identity"},
  "l": 0.2,
  "u": "none",
  "x0": {"kind": "constant", "a": 1},
  "particles": 20000,
  "steps": 200,
  "horizon": 2,
  "budget_seconds": 120
})"},
        {"ou_band", R"({
  "command": "picard",
  "f": {"kind": "constant", "a": 0.3},
  "g": {"kind": "affine", "a": -0.25, "b": 0.15},
  "driver": {"name": "pii", "scale": 1, "clock": true},
  "h": {"name": "identity"},
  "l": -0.4,
  "u": 0.4,
  "x0": {"kind": "constant", "a": 0},
  "particles": 2000,
  "steps": 200,
  "horizon": 2,
  "picard_tol": 1e-6,
  "budget_seconds": 180
})"},
        {"soft_band", R"({
  "command": "picard",
  "f": {"kind": "constant", "a": 0.3},
  "g": {"kind": "affine", "a": -0.25, "b": 0.2},
  "driver": {"name": "pii", "scale": 1, "clock": true},
  "h": {"name": "soft", "beta": 0.5},
  "l": -0.5,
  "u": 0.5,
  "x0": {"kind": "constant", "a": 0},
  "particles": 400,
  "steps": 200,
  "horizon": 2,
  "picard_tol": 1e-6,
  "budget_seconds": 240
})"},
        {"poisson_floor", R"({
  "command": "simulate",
  "f": {"kind": "constant", "a": 0.5},
  "g": {"kind": "constant", "a": 0.5},
  "driver": {"name": "cpois", "rate": 2, "jump": {"law": "uniform", "a": 0, "b": 0.4}},
  "h": {"name": "soft", "beta": 0.3},
  "l": {"start": 1, "slope": 0.3},
  "u": "none",
  "x0": {"kind": "constant", "a": 1},
  "particles": 1000,
  "steps": 200,
  "horizon": 2,
  "budget_seconds": 180
})"},
        {"invest_base", R"({
  "command": "invest",
  "x0v": 1,
  "s0": 1,
  "b": 0.05,
  "sigma": 0.2,
  "jumps": {"rate": 1, "jump": {"law": "uniform", "a": -0.1, "b": 0.1}},
  "h": {"name": "concave", "beta": 0.5},
  "l": {"start": 0.68, "slope": 0.05},
  "u": 1.5,
  "particles": 5000,
  "steps": 100,
  "horizon": 1,
  "budget_seconds": 120
})"},
        {"converge_smooth", R"({
  "command": "converge",
  "f": {"kind": "constant", "a": 0.5},
  "g": {"kind": "ramp", "a": -0.6},
  "driver": {"name": "pii", "scale": 1, "clock": true},
  "h": {"name": "identity"},
  "l": 0.2,
  "u": "none",
  "x0": {"kind": "constant", "a": 1},
  "particles": 20000,
  "steps": 200,
  "horizon": 2,
  "n_list": [50, 100, 200, 400, 800],
  "reference_n": 3200,
  "budget_seconds": 300
})"},
    };
    return reg;
}

}  // namespace

std::vector<std::string> scenario_names() {
    std::vector<std::string> names;
    for (const auto& [name, text] : registry()) names.push_back(name);
    return names;
}

nlohmann::json scenario_config(const std::string& name) {
    const auto it = registry().find(name);
    if (it == registry().end()) throw ConfigError("missing scenario '" + name + "'");
    return nlohmann::json::parse(it->second);
}

}  // namespace meanreflect::cli
