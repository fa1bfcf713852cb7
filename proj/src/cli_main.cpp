#include <iostream>

#include "CLI11.hpp"
#include "meanreflect/cli.hpp"
#include "meanreflect/errors.hpp"

namespace meanreflect::cli {

int run_main(int argc, const char* const* argv) {
    CLI::App app{"mean-reflect: reflection problems and SDEs with mean constraints"};
    std::string command, config_path;
    Flags flags;
    std::uint64_t seed = 0;
    std::size_t particles = 0;
    long steps = 0;
    double horizon = 0.0, tol = 0.0;
    std::string out;

    app.add_option("command", command, "one of: sp mean-sp simulate picard converge invest verify")
        ->required();
    app.add_option("--config", config_path, "config file (JSON)");
    auto* seed_opt = app.add_option("--seed", seed, "RNG seed");
    auto* particles_opt = app.add_option("--particles", particles, "particle count");
    auto* steps_opt = app.add_option("--steps", steps, "grid steps per unit time");
    auto* horizon_opt = app.add_option("--horizon", horizon, "time horizon");
    auto* tol_opt = app.add_option("--tol", tol, "root tolerance");
    auto* out_opt = app.add_option("--out", out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

    if (*seed_opt) flags.seed = seed;
    if (*particles_opt) flags.particles = particles;
    if (*steps_opt) flags.steps = steps;
    if (*horizon_opt) flags.horizon = horizon;
    if (*tol_opt) flags.tol = tol;
    if (*out_opt) flags.out = out;

    try {
        nlohmann::json file_config;
        if (!config_path.empty()) file_config = load_config_file(config_path);
        const nlohmann::json resolved = resolve_config(command, file_config, flags);
        std::string run_dir;
        const int code = run(resolved, &run_dir);
        std::cout << run_dir << "\n";
        return code;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const InvalidArgumentError& e) {
        std::cerr << "invalid argument: " << e.what() << "\n";
        return 2;
    } catch (const ConstraintViolationError& e) {
        std::cerr << "constraint violation: " << e.what() << "\n";
        return 1;
    } catch (const NumericalFailureError& e) {
        std::cerr << "numerical failure: " << e.what() << " (residual " << e.residual()
                  << ")\n";
        return 1;
    }
}

}  // namespace meanreflect::cli
