#include "meanreflect/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "meanreflect/errors.hpp"
#include "meanreflect/io.hpp"
#include "meanreflect/mean_sp.hpp"
#include "meanreflect/rng.hpp"
#include "meanreflect/sde.hpp"
#include "meanreflect/skorokhod.hpp"

namespace meanreflect::cli {

using nlohmann::json;

namespace {

// ---------------------------------------------------------------- schema --

const std::set<std::string> kCommands = {"sp",      "mean-sp", "simulate", "picard",
                                         "converge", "invest",  "verify"};

const std::set<std::string> kCommonKeys = {"command", "scenario", "seed",
                                           "out",     "tol",      "budget_seconds"};

const std::map<std::string, std::set<std::string>>& command_keys() {
    static const std::map<std::string, std::set<std::string>> keys = {
        {"sp", {"y", "l", "u", "steps", "horizon"}},
        {"mean-sp",
         {"h", "l", "u", "y_base", "y_noise", "particles", "steps", "horizon"}},
        {"simulate",
         {"h", "l", "u", "f", "g", "driver", "additive", "x0", "particles", "steps",
          "horizon", "picard_tol"}},
        {"picard",
         {"h", "l", "u", "f", "g", "driver", "additive", "x0", "particles", "steps",
          "horizon", "picard_tol"}},
        {"converge",
         {"h", "l", "u", "f", "g", "driver", "additive", "x0", "particles", "steps",
          "horizon", "picard_tol", "n_list", "reference_n"}},
        {"invest",
         {"x0v", "s0", "b", "sigma", "jumps", "h", "l", "u", "particles", "steps",
          "horizon"}},
        {"verify", {"solution"}},
    };
    return keys;
}

void check_keys(const json& cfg, const std::string& command) {
    const auto& allowed = command_keys().at(command);
    for (const auto& item : cfg.items()) {
        if (kCommonKeys.count(item.key())) continue;
        if (!allowed.count(item.key()))
            throw ConfigError("unknown key '" + item.key() + "' for command '" + command +
                              "'");
    }
}

void check_object_keys(const json& obj, const std::set<std::string>& allowed,
                       const std::string& context) {
    if (!obj.is_object()) throw ConfigError("'" + context + "' must be an object");
    for (const auto& item : obj.items()) {
        if (!allowed.count(item.key()))
            throw ConfigError("unknown key '" + item.key() + "' in '" + context + "'");
    }
}

double get_num(const json& cfg, const std::string& key, double fallback) {
    if (!cfg.contains(key)) return fallback;
    if (!cfg.at(key).is_number()) throw ConfigError("key '" + key + "' must be a number");
    return cfg.at(key).get<double>();
}

long get_int(const json& cfg, const std::string& key, long fallback) {
    if (!cfg.contains(key)) return fallback;
    if (!cfg.at(key).is_number_integer())
        throw ConfigError("key '" + key + "' must be an integer");
    return cfg.at(key).get<long>();
}

std::string get_str(const json& cfg, const std::string& key, const std::string& fallback) {
    if (!cfg.contains(key)) return fallback;
    if (!cfg.at(key).is_string()) throw ConfigError("key '" + key + "' must be a string");
    return cfg.at(key).get<std::string>();
}

// ------------------------------------------------------------ registries --

PiecewiseSpec parse_path_spec(const json& j, const std::string& context) {
    if (j.is_number()) return PiecewiseSpec::constant(j.get<double>());
    if (!j.is_object())
        throw ConfigError("'" + context + "' must be a number or a path object");
    if (j.contains("start") || j.contains("slope")) {
        check_object_keys(j, {"start", "slope"}, context);
        return PiecewiseSpec::linear(get_num(j, "start", 0.0), get_num(j, "slope", 0.0));
    }
    check_object_keys(j, {"segments", "jumps"}, context);
    PiecewiseSpec spec;
    if (!j.contains("segments"))
        throw ConfigError("'" + context + "' needs 'segments' (or start/slope)");
    for (const auto& s : j.at("segments")) {
        check_object_keys(s, {"from", "to", "value", "slope"}, context + ".segments");
        PathSegment seg;
        seg.from = get_num(s, "from", 0.0);
        seg.to = get_num(s, "to", 0.0);
        if (s.contains("value")) seg.value = get_num(s, "value", 0.0);
        if (s.contains("slope")) seg.slope = get_num(s, "slope", 0.0);
        spec.segments.push_back(seg);
    }
    if (j.contains("jumps")) {
        for (const auto& jm : j.at("jumps")) {
            check_object_keys(jm, {"at", "to_value"}, context + ".jumps");
            spec.jumps.push_back({get_num(jm, "at", 0.0), get_num(jm, "to_value", 0.0)});
        }
    }
    spec.validate();
    return spec;
}

Barrier parse_barrier(const json& cfg, const std::string& key, TimeGridPtr grid) {
    if (!cfg.contains(key)) return std::nullopt;
    const json& j = cfg.at(key);
    if (j.is_null() || (j.is_string() && j.get<std::string>() == "none")) return std::nullopt;
    return parse_path_spec(j, key).sample(std::move(grid));
}

ConstraintFunction parse_h(const json& cfg, double horizon) {
    json spec = cfg.contains("h") ? cfg.at("h") : json{{"name", "identity"}};
    const std::string name = spec.is_object() ? get_str(spec, "name", "identity") : "";
    ConstraintFunction h;
    if (name == "identity") {
        check_object_keys(spec, {"name"}, "h");
        h = make_identity();
    } else if (name == "affine") {
        check_object_keys(spec, {"name", "a", "b"}, "h");
        h = make_affine(get_num(spec, "a", 1.0), get_num(spec, "b", 0.0));
    } else if (name == "soft") {
        check_object_keys(spec, {"name", "beta"}, "h");
        h = make_soft(get_num(spec, "beta", 0.5));
    } else if (name == "concave") {
        check_object_keys(spec, {"name", "beta"}, "h");
        h = make_concave(get_num(spec, "beta", 0.5));
    } else if (name == "time_tilt") {
        check_object_keys(spec, {"name", "gamma", "t_max"}, "h");
        h = make_time_tilt(get_num(spec, "gamma", 0.5),
                           get_num(spec, "t_max", std::max(horizon, 1.0)));
    } else {
        throw ConfigError("unknown constraint function '" + name + "'");
    }
    audit_constants(h, std::max(horizon, 1.0));
    return h;
}

JumpLaw parse_jump_law(const json& j, const std::string& context) {
    check_object_keys(j, {"law", "a", "b"}, context);
    const std::string law = get_str(j, "law", "constant");
    if (law == "constant") return JumpLaw::constant(get_num(j, "a", 1.0));
    if (law == "uniform") return JumpLaw::uniform(get_num(j, "a", 0.0), get_num(j, "b", 1.0));
    throw ConfigError("unknown jump law '" + law + "' in '" + context + "'");
}

std::optional<CompoundPoissonSpec> parse_cpois(const json& cfg, const std::string& key) {
    if (!cfg.contains(key) || cfg.at(key).is_null()) return std::nullopt;
    const json& j = cfg.at(key);
    check_object_keys(j, {"rate", "jump"}, key);
    CompoundPoissonSpec spec;
    spec.rate = get_num(j, "rate", 1.0);
    if (!(spec.rate > 0.0)) throw ConfigError("'" + key + ".rate' must be positive");
    spec.law = j.contains("jump") ? parse_jump_law(j.at("jump"), key + ".jump")
                                  : JumpLaw::constant(1.0);
    return spec;
}

Driver parse_driver(const json& cfg) {
    json spec = cfg.contains("driver") ? cfg.at("driver") : json{{"name", "clock"}};
    const std::string name = spec.is_object() ? get_str(spec, "name", "clock") : "";
    if (name == "brownian") {
        check_object_keys(spec, {"name", "scale"}, "driver");
        return Driver::brownian(get_num(spec, "scale", 1.0));
    }
    if (name == "clock") {
        check_object_keys(spec, {"name"}, "driver");
        return Driver::deterministic_clock();
    }
    if (name == "cpois") {
        check_object_keys(spec, {"name", "rate", "jump"}, "driver");
        CompoundPoissonSpec cp;
        cp.rate = get_num(spec, "rate", 1.0);
        cp.law = spec.contains("jump") ? parse_jump_law(spec.at("jump"), "driver.jump")
                                       : JumpLaw::constant(1.0);
        return Driver::compensated_poisson(cp.rate, cp.law);
    }
    if (name == "pii") {
        check_object_keys(spec, {"name", "scale", "clock", "cpois"}, "driver");
        std::optional<CompoundPoissonSpec> cp = parse_cpois(spec, "cpois");
        const bool clock = spec.contains("clock") ? spec.at("clock").get<bool>() : true;
        return Driver::pii(get_num(spec, "scale", 1.0), clock, std::move(cp));
    }
    throw ConfigError("unknown driver '" + name + "'");
}

CoeffSpec parse_coeff(const json& cfg, const std::string& key) {
    if (!cfg.contains(key)) return {"zero", 0.0, 0.0};
    const json& j = cfg.at(key);
    CoeffSpec spec;
    spec.kind = j.is_object() ? get_str(j, "kind", "zero") : "";
    if (spec.kind == "zero")
        check_object_keys(j, {"kind"}, key);
    else if (spec.kind == "affine")
        check_object_keys(j, {"kind", "a", "b"}, key);
    else
        check_object_keys(j, {"kind", "a"}, key);
    spec.a = get_num(j, "a", 0.0);
    spec.b = get_num(j, "b", 0.0);
    return spec;
}

X0Sampler parse_x0(const json& cfg) {
    if (!cfg.contains("x0")) return X0Sampler::constant(0.0);
    const json& j = cfg.at("x0");
    const std::string kind = j.is_object() ? get_str(j, "kind", "constant") : "";
    if (kind == "constant") {
        check_object_keys(j, {"kind", "a"}, "x0");
        return X0Sampler::constant(get_num(j, "a", 0.0));
    }
    check_object_keys(j, {"kind", "a", "b"}, "x0");
    if (kind == "uniform")
        return X0Sampler::uniform(get_num(j, "a", 0.0), get_num(j, "b", 1.0));
    if (kind == "gaussian")
        return X0Sampler::gaussian(get_num(j, "a", 0.0), get_num(j, "b", 1.0));
    throw ConfigError("unknown x0 sampler '" + kind + "'");
}

}  // namespace

SimulationConfig simulation_from_config(const json& cfg) {
    SimulationConfig sim;
    sim.steps_per_unit = get_int(cfg, "steps", 100);
    sim.horizon = get_num(cfg, "horizon", 1.0);
    sim.particles = static_cast<std::size_t>(get_int(cfg, "particles", 1000));
    sim.seed = static_cast<std::uint64_t>(get_int(cfg, "seed", 1));
    sim.tol = get_num(cfg, "tol", 1e-10);
    sim.picard_tol = get_num(cfg, "picard_tol", 1e-6);
    sim.x0 = parse_x0(cfg);
    sim.h = parse_h(cfg, sim.horizon);
    sim.driver = parse_driver(cfg);
    sim.additive = parse_cpois(cfg, "additive");
    sim.coefficients = make_coefficients(parse_coeff(cfg, "f"), parse_coeff(cfg, "g"),
                                         std::max(sim.horizon, 1.0));
    audit_coefficients(sim.coefficients);
    const TimeGridPtr grid = TimeGrid::uniform(sim.steps_per_unit, sim.horizon);
    sim.barriers.lower = parse_barrier(cfg, "l", grid);
    sim.barriers.upper = parse_barrier(cfg, "u", grid);
    sim.barriers.validate();
    return sim;
}

namespace {

// --------------------------------------------------------------- helpers --

std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t hash = 1469598103934665603ull;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    return hash;
}

std::string run_id(const json& resolved) {
    const std::uint64_t h = fnv1a64(resolved.dump());
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

json minimality_json(const MinimalityReport& rep) {
    json out;
    out["all_ok"] = rep.all_ok;
    out["integral_eps"] = rep.integral_eps;
    json signs = json::array();
    for (const auto& s : rep.sign_checks)
        signs.push_back({{"begin", s.begin},
                         {"end", s.end},
                         {"below_upper", s.below_upper},
                         {"ok", s.ok}});
    out["sign_checks"] = signs;
    json integrals = json::array();
    for (const auto& c : rep.integral_checks)
        integrals.push_back({{"begin", c.begin},
                             {"end", c.end},
                             {"lower_integral", c.lower_integral},
                             {"upper_integral", c.upper_integral},
                             {"ok", c.ok}});
    out["integral_checks"] = integrals;
    json jumps = json::array();
    for (const auto& v : rep.jump_violations)
        jumps.push_back({{"index", v.index}, {"dk", v.dk}, {"gap", v.gap}});
    out["jump_violations"] = jumps;
    return out;
}

struct RunDir {
    std::filesystem::path dir;

    void write(const std::string& name, const std::string& content) const {
        io::atomic_write((dir / name).string(), content);
    }
    void write_json(const std::string& name, const json& j) const {
        write(name, j.dump(2) + "\n");
    }
};

RunDir make_run_dir(const json& resolved) {
    const std::string out = resolved.value("out", "runs");
    std::filesystem::path dir = std::filesystem::path(out) / run_id(resolved);
    std::filesystem::create_directories(dir);
    return {dir};
}

json meta_json(const json& resolved, const std::string& id) {
    json meta;
    meta["run_id"] = id;
    meta["command"] = resolved.at("command");
    meta["config"] = resolved;
    const std::string command = resolved.at("command").get<std::string>();
    if (command == "simulate" || command == "picard" || command == "converge") {
        const SimulationConfig sim = simulation_from_config(resolved);
        meta["seed"] = sim.seed;
        meta["particles"] = sim.particles;
        meta["steps"] = sim.steps_per_unit;
        meta["horizon"] = sim.horizon;
        meta["tol"] = sim.tol;
        meta["driver"] = sim.driver.name;
        meta["h"] = sim.h.name;
        meta["constants"] = {{"lower_slope", sim.h.lower_slope},
                             {"upper_slope", sim.h.upper_slope},
                             {"time_lipschitz", sim.h.time_lipschitz},
                             {"growth", sim.h.growth},
                             {"mu", sim.coefficients.growth},
                             {"lipschitz", sim.coefficients.lipschitz},
                             {"m_slope", sim.driver.m_slope()}};
    }
    return meta;
}

// Ensembles for the pure reflection problem: base path plus a per-particle
// offset and an independent random walk.
EnsemblePath build_law(const json& cfg, TimeGridPtr grid, std::uint64_t seed,
                       std::size_t particles) {
    if (!cfg.contains("y_base")) throw ConfigError("mean-sp needs 'y_base'");
    const GridPath base = parse_path_spec(cfg.at("y_base"), "y_base").sample(grid);
    double offset_scale = 0.2, walk_scale = 0.2;
    if (cfg.contains("y_noise")) {
        check_object_keys(cfg.at("y_noise"), {"offset", "brownian"}, "y_noise");
        offset_scale = get_num(cfg.at("y_noise"), "offset", 0.2);
        walk_scale = get_num(cfg.at("y_noise"), "brownian", 0.2);
    }
    EnsemblePath law;
    law.grid = grid;
    std::vector<std::vector<double>> rows(grid->size(),
                                          std::vector<double>(particles));
    for (std::size_t i = 0; i < particles; ++i) {
        const double offset =
            offset_scale * rng::normal01({seed, i, rng::kInitStep, 0});
        double walk = 0.0;
        rows[0][i] = base.value(0) + offset;
        for (std::size_t j = 1; j < grid->size(); ++j) {
            const double dt = grid->point(j) - grid->point(j - 1);
            walk += walk_scale * std::sqrt(dt) *
                    rng::normal01({seed, i, static_cast<std::uint32_t>(j - 1), 0});
            rows[j][i] = base.value(j) + offset + walk;
        }
    }
    for (auto& row : rows) law.slices.emplace_back(std::move(row));
    return law;
}

// ------------------------------------------------------------- commands ---

int run_sp(const json& resolved, const RunDir& dir) {
    const long steps = get_int(resolved, "steps", 100);
    const double horizon = get_num(resolved, "horizon", 1.0);
    const TimeGridPtr grid = TimeGrid::uniform(steps, horizon);
    if (!resolved.contains("y")) throw ConfigError("sp needs 'y'");
    const GridPath y = parse_path_spec(resolved.at("y"), "y").sample(grid);
    BarrierPair barriers;
    barriers.lower = parse_barrier(resolved, "l", grid);
    barriers.upper = parse_barrier(resolved, "u", grid);
    barriers.validate();
    const SkorokhodSolution sol = solve_two_barrier(y, barriers);
    const SkorokhodSolution cross = solve_two_barrier_explicit(y, barriers);
    double max_diff = 0.0;
    for (std::size_t i = 0; i < sol.k.size(); ++i)
        max_diff = std::max(max_diff, std::fabs(sol.k.value(i) - cross.k.value(i)));
    if (max_diff > 1e-10)
        throw NumericalFailureError("solver cross-check failed", max_diff);
    dir.write("solution.csv", io::deterministic_csv(y, barriers, sol));
    return 0;
}

int run_mean_sp(const json& resolved, const RunDir& dir) {
    MeanProblem p;
    const long steps = get_int(resolved, "steps", 100);
    const double horizon = get_num(resolved, "horizon", 1.0);
    const std::size_t particles =
        static_cast<std::size_t>(get_int(resolved, "particles", 1000));
    const auto seed = static_cast<std::uint64_t>(get_int(resolved, "seed", 1));
    const TimeGridPtr grid = TimeGrid::uniform(steps, horizon);
    p.law = build_law(resolved, grid, seed, particles);
    p.h = parse_h(resolved, horizon);
    p.barriers.lower = parse_barrier(resolved, "l", grid);
    p.barriers.upper = parse_barrier(resolved, "u", grid);
    p.barriers.validate();
    p.tol = get_num(resolved, "tol", 1e-10);

    MeanSolution sol;
    if (p.barriers.lower && !p.barriers.upper)
        sol = solve_mean_lower(p);
    else if (p.barriers.upper && !p.barriers.lower)
        sol = solve_mean_upper(p);
    else
        sol = solve_mean_two_barrier(p);

    dir.write("solution.csv", io::solution_csv(sol));
    const MinimalityReport rep = verify_minimality(sol);
    dir.write_json("report.json", minimality_json(rep));
    return rep.all_ok ? 0 : 1;
}

int run_simulate(const json& resolved, const RunDir& dir) {
    const SimulationConfig sim = simulation_from_config(resolved);
    const SimResult result = euler_mean_reflected(sim);
    dir.write("solution.csv", io::solution_csv(result.solution));
    json timing;
    timing["wall_seconds"] = result.diagnostics.wall_seconds;
    timing["step_seconds"] = result.diagnostics.step_seconds;
    dir.write_json("timing.json", timing);
    return 0;
}

int run_picard(const json& resolved, const RunDir& dir) {
    const SimulationConfig sim = simulation_from_config(resolved);
    const PicardResult result = picard_solve(sim);
    dir.write("solution.csv", io::solution_csv(result.solution));
    json report;
    json intervals = json::array();
    for (const auto& log : result.intervals)
        intervals.push_back({{"t_begin", log.t_begin},
                             {"t_end", log.t_end},
                             {"iterations", log.iterations},
                             {"max_ratio", log.max_ratio}});
    report["intervals"] = intervals;
    dir.write_json("report.json", report);
    return 0;
}

int run_converge(const json& resolved, const RunDir& dir) {
    const SimulationConfig sim = simulation_from_config(resolved);
    if (!resolved.contains("n_list") || !resolved.at("n_list").is_array())
        throw ConfigError("converge needs an integer array 'n_list'");
    std::vector<long> n_list;
    for (const auto& v : resolved.at("n_list")) n_list.push_back(v.get<long>());
    const long reference_n = get_int(resolved, "reference_n", 0);
    const ConvergenceTable table = convergence_study(sim, n_list, reference_n);
    std::ostringstream csv;
    csv << "n,err_k,err_x\n";
    for (const auto& row : table.rows)
        csv << row.n << ',' << io::format_double(row.err_k) << ','
            << io::format_double(row.err_x) << '\n';
    dir.write("solution.csv", csv.str());
    return 0;
}

int run_invest(const json& resolved, const RunDir& dir) {
    InvestmentParams params;
    params.x0 = get_num(resolved, "x0v", 1.0);
    params.s0 = get_num(resolved, "s0", 1.0);
    params.drift = get_num(resolved, "b", 0.05);
    params.volatility = get_num(resolved, "sigma", 0.2);
    params.reserve_jumps = parse_cpois(resolved, "jumps");
    const double horizon = get_num(resolved, "horizon", 1.0);
    params.h = parse_h(resolved, horizon);
    params.horizon = horizon;
    params.steps_per_unit = get_int(resolved, "steps", 100);
    params.particles = static_cast<std::size_t>(get_int(resolved, "particles", 1000));
    params.seed = static_cast<std::uint64_t>(get_int(resolved, "seed", 1));
    params.tol = get_num(resolved, "tol", 1e-10);
    const TimeGridPtr grid = TimeGrid::uniform(params.steps_per_unit, horizon);
    params.barriers.lower = parse_barrier(resolved, "l", grid);
    params.barriers.upper = parse_barrier(resolved, "u", grid);
    params.barriers.validate();

    const InvestmentResult result = investment_scenario(params);
    dir.write("solution.csv", io::solution_csv(result.sim.solution));
    std::ostringstream csv;
    csv << "t,stock_mean,strategy_mean,wealth_mean\n";
    for (std::size_t j = 0; j < result.stock_mean.size(); ++j)
        csv << io::format_double(result.stock_mean.grid()->point(j)) << ','
            << io::format_double(result.stock_mean.value(j)) << ','
            << io::format_double(result.strategy_mean.value(j)) << ','
            << io::format_double(result.wealth_mean.value(j)) << '\n';
    dir.write("strategy.csv", csv.str());
    return 0;
}

int run_verify(const json& resolved, const RunDir& dir) {
    if (!resolved.contains("solution")) throw ConfigError("verify needs 'solution'");
    const std::string path = resolved.at("solution").get<std::string>();
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open solution file '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    MeanSolution sol = io::parse_solution_csv(buffer.str());
    sol.tol = get_num(resolved, "tol", 1e-10);
    const MinimalityReport rep = verify_minimality(sol);
    dir.write_json("report.json", minimality_json(rep));
    return rep.all_ok ? 0 : 1;
}

}  // namespace

json load_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();
    try {
        return json::parse(text);
    } catch (const json::parse_error& err) {
        // Translate the byte offset into line/column.
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i + 1 < err.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ConfigError("config parse error at line " + std::to_string(line) + ", column " +
                          std::to_string(col) + ": " + err.what());
    }
}

json resolve_config(const std::string& command, const json& file_config, const Flags& flags) {
    if (!kCommands.count(command)) throw ConfigError("unknown command '" + command + "'");
    if (!file_config.is_object() && !file_config.is_null())
        throw ConfigError("config root must be an object");

    json resolved = json::object();
    if (file_config.is_object() && file_config.contains("scenario")) {
        const std::string name = file_config.at("scenario").get<std::string>();
        resolved = scenario_config(name);  // throws on missing scenario
        const std::string scen_cmd = resolved.value("command", "");
        if (scen_cmd != command)
            throw ConfigError("scenario '" + name + "' is for command '" + scen_cmd + "'");
        resolved["scenario"] = name;
    }
    if (file_config.is_object()) {
        for (const auto& item : file_config.items()) resolved[item.key()] = item.value();
    }
    if (resolved.contains("command") &&
        resolved.at("command").get<std::string>() != command)
        throw ConfigError("config file is for command '" +
                          resolved.at("command").get<std::string>() + "'");
    resolved["command"] = command;

    if (flags.seed) resolved["seed"] = *flags.seed;
    if (flags.particles) resolved["particles"] = *flags.particles;
    if (flags.steps) resolved["steps"] = *flags.steps;
    if (flags.horizon) resolved["horizon"] = *flags.horizon;
    if (flags.tol) resolved["tol"] = *flags.tol;
    if (flags.out) resolved["out"] = *flags.out;

    check_keys(resolved, command);
    if (!resolved.contains("seed")) resolved["seed"] = 1;
    if (!resolved.contains("tol")) resolved["tol"] = 1e-10;
    if (!resolved.contains("out")) resolved["out"] = "runs";
    return resolved;
}

int run(const json& resolved, std::string* run_dir_out) {
    const std::string command = resolved.at("command").get<std::string>();
    const RunDir dir = make_run_dir(resolved);
    if (run_dir_out) *run_dir_out = dir.dir.string();
    dir.write_json("meta.json", meta_json(resolved, run_id(resolved)));
    if (command == "sp") return run_sp(resolved, dir);
    if (command == "mean-sp") return run_mean_sp(resolved, dir);
    if (command == "simulate") return run_simulate(resolved, dir);
    if (command == "picard") return run_picard(resolved, dir);
    if (command == "converge") return run_converge(resolved, dir);
    if (command == "invest") return run_invest(resolved, dir);
    if (command == "verify") return run_verify(resolved, dir);
    throw ConfigError("unknown command '" + command + "'");
}

}  // namespace meanreflect::cli
