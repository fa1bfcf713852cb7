#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "meanreflect/sde.hpp"

namespace meanreflect::cli {

// Flag overrides; precedence is flags > config file > scenario > defaults.
struct Flags {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> particles;
    std::optional<long> steps;
    std::optional<double> horizon;
    std::optional<double> tol;
    std::optional<std::string> out;
};

// Parses a config file (strict JSON, unknown keys rejected) and applies the
// scenario base and flag overrides. Throws ConfigError with line/column on
// parse errors and the offending key on schema violations.
nlohmann::json resolve_config(const std::string& command, const nlohmann::json& file_config,
                              const Flags& flags);

nlohmann::json load_config_file(const std::string& path);

// Builds a SimulationConfig from the simulate/picard/converge schema
// (used by those commands and by the acceptance harness).
SimulationConfig simulation_from_config(const nlohmann::json& resolved);

// Names of the shipped scenario registry, and the scenario base config.
std::vector<std::string> scenario_names();
nlohmann::json scenario_config(const std::string& name);

// Executes a resolved config. Artifacts are written atomically under
// <out>/<run-id>/. Returns the exit code (0 success, 1 constraint or
// verification failure) and reports the run directory when requested.
int run(const nlohmann::json& resolved, std::string* run_dir_out = nullptr);

// Full CLI entry point: parses argv, loads the config, resolves, runs.
// Returns 2 on usage/config errors.
int run_main(int argc, const char* const* argv);

}  // namespace meanreflect::cli
