#include <cmath>
#include <random>

#include "doctest.h"
#include "meanreflect/errors.hpp"
#include "meanreflect/parallel.hpp"
#include "meanreflect/sde.hpp"
#include "test_util.hpp"

using namespace meanreflect;

namespace {

SimulationConfig base_config() {
    SimulationConfig cfg;
    cfg.x0 = X0Sampler::constant(0.0);
    cfg.steps_per_unit = 100;
    cfg.horizon = 1.0;
    cfg.particles = 500;
    cfg.seed = 2024;
    cfg.tol = 1e-10;
    cfg.picard_tol = 1e-8;
    cfg.coefficients = make_coefficients({"zero"}, {"zero"}, 2.0);
    cfg.driver = Driver::deterministic_clock();
    cfg.h = make_identity();
    return cfg;
}

BarrierPair const_band(const TimeGridPtr& grid, double lo, double hi) {
    GridPath lower = GridPath::constant(grid, lo);
    GridPath upper = GridPath::constant(grid, hi);
    return BarrierPair::two_sided(std::move(lower), std::move(upper));
}

}  // namespace

TEST_CASE("jump law moments") {
    const JumpLaw c = JumpLaw::constant(-0.5);
    CHECK(c.mean() == -0.5);
    CHECK(c.abs_mean() == 0.5);
    CHECK(c.second_moment() == 0.25);
    const JumpLaw u = JumpLaw::uniform(-1.0, 3.0);
    CHECK(u.mean() == doctest::Approx(1.0));
    CHECK(u.second_moment() == doctest::Approx((1.0 - 3.0 + 9.0) / 3.0));
    CHECK(u.abs_mean() == doctest::Approx((1.0 + 9.0) / 8.0));
    CHECK(u.bound() == 3.0);
    // abs_mean by quadrature against the closed form
    double acc = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) acc += std::fabs(-1.0 + 4.0 * (i + 0.5) / n);
    CHECK(u.abs_mean() == doctest::Approx(acc / n).epsilon(1e-6));
}

TEST_CASE("driver characteristics stay below the dominating function") {
    const std::size_t particles = 4000;
    const long n = 50;
    const double q = 2.0;
    for (const Driver& driver :
         {Driver::brownian(1.0), Driver::compensated_poisson(2.0, JumpLaw::uniform(0.0, 0.4)),
          Driver::pii(0.7, true, CompoundPoissonSpec{1.0, JumpLaw::constant(0.3)})}) {
        CAPTURE(driver.name);
        const IncrementSampler sampler(driver, 77, n, 1);
        const long steps = static_cast<long>(q * n);
        std::vector<double> qv(particles, 0.0);
        const double allowance = 1.0 + 5.0 / std::sqrt(static_cast<double>(particles));
        for (long j = 0; j < steps; ++j) {
            for (std::size_t i = 0; i < particles; ++i) {
                double dm, dv;
                sampler.sample(i, j, dm, dv);
                qv[i] += dm * dm;
            }
            const double t = static_cast<double>(j + 1) / n;
            CHECK(mean(qv) <= driver.m_slope() * t * allowance);
        }
    }
}

TEST_CASE("discretized compensated-Poisson characteristics by direct summation") {
    // Per-step conditional variance of the compensated increment is
    // rate * E[J^2] * dt exactly; the summed characteristic stays below m.
    const Driver driver = Driver::compensated_poisson(2.0, JumpLaw::uniform(0.0, 0.4));
    const long n = 100;
    const double per_step = 2.0 * driver.cpois->law.second_moment() / n;
    double acc = 0.0;
    for (long j = 1; j <= 2 * n; ++j) {
        acc += per_step;
        CHECK(acc <= driver.m_slope() * (static_cast<double>(j) / n) * (1.0 + 1e-12));
    }
    // and |~V| slope dominates the compensator drift
    CHECK(driver.variation_slope() >= 2.0 * std::fabs(driver.cpois->law.mean()));
}

TEST_CASE("nothing moves when the coefficients vanish inside the band") {
    SimulationConfig cfg = base_config();
    const auto grid = TimeGrid::uniform(cfg.steps_per_unit, cfg.horizon);
    cfg.barriers = const_band(grid, -1.0, 1.0);
    const SimResult result = euler_mean_reflected(cfg);
    for (std::size_t j = 0; j < result.solution.grid->size(); ++j) {
        CHECK(result.solution.k.value(j) == 0.0);
        CHECK(result.solution.x_mean.value(j) == 0.0);
        CHECK(result.solution.eh.value(j) == 0.0);
    }
}

TEST_CASE("deterministic drift against a floor has the closed form") {
    SimulationConfig cfg = base_config();
    cfg.x0 = X0Sampler::constant(1.0);
    cfg.horizon = 2.0;
    cfg.steps_per_unit = 200;
    cfg.particles = 1;
    cfg.coefficients = make_coefficients({"zero"}, {"constant", -1.0}, 2.0);
    const auto grid = TimeGrid::uniform(cfg.steps_per_unit, cfg.horizon);
    cfg.barriers.lower = GridPath::constant(grid, 0.0);
    const SimResult result = euler_mean_reflected(cfg);
    for (std::size_t j = 0; j < result.solution.grid->size(); ++j) {
        const double t = result.solution.grid->point(j);
        CHECK(std::fabs(result.solution.k.value(j) - std::max(t - 1.0, 0.0)) <= 1e-12);
        CHECK(std::fabs(result.solution.x_mean.value(j) - std::max(1.0 - t, 0.0)) <= 1e-12);
    }
}

TEST_CASE("Brownian noise with a rising floor tracks the mean reflection") {
    SimulationConfig cfg = base_config();
    cfg.x0 = X0Sampler::constant(1.0);
    cfg.horizon = 2.0;
    cfg.steps_per_unit = 100;
    cfg.particles = 20000;
    cfg.coefficients = make_coefficients({"constant", 0.5}, {"zero"}, 2.0);
    cfg.driver = Driver::brownian(1.0);
    const auto grid = TimeGrid::uniform(cfg.steps_per_unit, cfg.horizon);
    cfg.barriers.lower = PiecewiseSpec::linear(1.0, 0.5).sample(grid);
    const SimResult result = euler_mean_reflected(cfg);
    const double root_n = std::sqrt(static_cast<double>(cfg.particles));
    for (std::size_t j = 0; j < result.solution.grid->size(); ++j) {
        const double t = result.solution.grid->point(j);
        const double slack = 4.0 * result.solution.x_std.value(j) / root_n;
        CHECK(std::fabs(result.solution.k.value(j) - 0.5 * t) <= slack + 1e-12);
    }
}

TEST_CASE("without barriers the scheme is the plain explicit recursion, bit for bit") {
    SimulationConfig cfg = base_config();
    cfg.x0 = X0Sampler::gaussian(0.2, 0.5);
    cfg.particles = 300;
    cfg.coefficients = make_coefficients({"linear", 0.6}, {"affine", -0.5, 0.2}, 2.0);
    cfg.driver = Driver::pii(1.0, true, CompoundPoissonSpec{1.5, JumpLaw::uniform(-0.2, 0.2)});
    cfg.keep_particles = true;
    const SimResult result = euler_mean_reflected(cfg);

    // plain (unreflected) recursion with the same increments
    const IncrementSampler sampler(cfg.driver, cfg.seed, cfg.steps_per_unit, 1);
    const auto grid = result.solution.grid;
    std::vector<double> x(cfg.particles);
    for (std::size_t i = 0; i < cfg.particles; ++i) x[i] = cfg.x0.sample(cfg.seed, i);
    for (std::size_t j = 0; j < grid->size(); ++j) {
        if (j > 0) {
            const double t = grid->point(j);
            for (std::size_t i = 0; i < cfg.particles; ++i) {
                double dm, dv;
                sampler.sample(i, static_cast<long>(j) - 1, dm, dv);
                x[i] += cfg.coefficients.f(t, x[i]) * dm + cfg.coefficients.g(t, x[i]) * dv;
            }
        }
        CHECK(result.solution.k.value(j) == 0.0);
        CHECK(result.solution.x_slices[j].particles() == x);
    }
}

TEST_CASE("the reflected scheme is bit-identical across worker counts") {
    SimulationConfig cfg = base_config();
    cfg.x0 = X0Sampler::constant(0.1);
    cfg.particles = 2500;
    cfg.coefficients = make_coefficients({"constant", 0.4}, {"affine", -0.3, 0.2}, 2.0);
    cfg.driver = Driver::pii(1.0, true, std::nullopt);
    cfg.h = make_soft(0.4);
    const auto grid = TimeGrid::uniform(cfg.steps_per_unit, cfg.horizon);
    cfg.barriers = const_band(grid, -0.5, 0.5);
    set_worker_count(1);
    const SimResult a = euler_mean_reflected(cfg);
    set_worker_count(4);
    const SimResult b = euler_mean_reflected(cfg);
    set_worker_count(1);
    CHECK(a.solution.k.values() == b.solution.k.values());
    CHECK(a.solution.eh.values() == b.solution.eh.values());
    CHECK(a.solution.x_mean.values() == b.solution.x_mean.values());
}

TEST_CASE("fixed-point solver") {
    SUBCASE("state-free coefficients converge in one corrective pass") {
        SimulationConfig cfg = base_config();
        cfg.x0 = X0Sampler::constant(1.0);
        cfg.horizon = 2.0;
        cfg.steps_per_unit = 64;
        cfg.particles = 1;
        cfg.coefficients = make_coefficients({"zero"}, {"constant", -1.0}, 2.0);
        const auto grid = TimeGrid::uniform(cfg.steps_per_unit, cfg.horizon);
        cfg.barriers.lower = GridPath::constant(grid, 0.0);
        const PicardResult pr = picard_solve(cfg);
        CHECK(pr.intervals.size() == 1);
        CHECK(pr.intervals[0].iterations <= 2);
        const SimResult euler = euler_mean_reflected(cfg);
        for (std::size_t j = 0; j < grid->size(); ++j)
            CHECK(std::fabs(pr.solution.k.value(j) - euler.solution.k.value(j)) <= 1e-14);
    }
    SUBCASE("state-dependent drift agrees with the explicit scheme") {
        SimulationConfig cfg = base_config();
        cfg.x0 = X0Sampler::constant(0.0);
        cfg.horizon = 1.0;
        cfg.steps_per_unit = 128;
        cfg.particles = 400;
        cfg.picard_tol = 1e-7;
        cfg.coefficients = make_coefficients({"constant", 0.3}, {"affine", -0.25, 0.15}, 2.0);
        cfg.driver = Driver::pii(1.0, true, std::nullopt);
        const auto grid = TimeGrid::uniform(cfg.steps_per_unit, cfg.horizon);
        cfg.barriers = const_band(grid, -0.4, 0.4);
        const PicardResult pr = picard_solve(cfg);
        const SimResult euler = euler_mean_reflected(cfg);
        double max_diff = 0.0;
        for (std::size_t j = 0; j < grid->size(); ++j)
            max_diff = std::max(
                max_diff, std::fabs(pr.solution.k.value(j) - euler.solution.k.value(j)));
        CHECK(max_diff <= cfg.picard_tol + 10.0 * cfg.tol);
        CHECK(pr.intervals.size() > 1);
        for (const auto& log : pr.intervals) {
            if (log.max_ratio > 0.0) CHECK(log.max_ratio <= 0.6);
        }
    }
    SUBCASE("no barriers reproduces the unreflected recursion") {
        SimulationConfig cfg = base_config();
        cfg.particles = 50;
        cfg.coefficients = make_coefficients({"zero"}, {"linear", -1.0}, 2.0);
        cfg.x0 = X0Sampler::constant(1.0);
        const PicardResult pr = picard_solve(cfg);
        const SimResult euler = euler_mean_reflected(cfg);
        for (std::size_t j = 0; j < pr.solution.grid->size(); ++j) {
            CHECK(pr.solution.k.value(j) == 0.0);
            CHECK(std::fabs(pr.solution.x_mean.value(j) - euler.solution.x_mean.value(j)) <=
                  1e-12);
        }
    }
    SUBCASE("mis-declared constants are detected as non-contraction") {
        SimulationConfig cfg = base_config();
        cfg.particles = 40;
        cfg.horizon = 2.0;
        cfg.steps_per_unit = 32;
        cfg.x0 = X0Sampler::constant(2.0);
        cfg.coefficients = make_coefficients({"zero"}, {"linear", -4.0}, 2.0);
        cfg.coefficients.lipschitz = 1e-9;  // lie about (A2)
        cfg.driver = Driver::pii(1.0, true, std::nullopt);
        const auto grid = TimeGrid::uniform(cfg.steps_per_unit, cfg.horizon);
        cfg.barriers = const_band(grid, -50.0, 50.0);
        CHECK_THROWS_AS(picard_solve(cfg), NumericalFailureError);
    }
}

TEST_CASE("martingale maximal-inequality diagnostic") {
    SUBCASE("Brownian motion at t = 1") {
        const auto rep = martingale_sup_check(Driver::brownian(1.0), 1.0, 64, 4000, 5);
        CHECK(rep.rhs == doctest::Approx(3.0));
        CHECK(rep.lhs > 0.5);  // sanity: the sup is genuinely positive
        CHECK(rep.holds);
    }
    SUBCASE("no martingale part") {
        const auto rep = martingale_sup_check(Driver::deterministic_clock(), 1.0, 64, 100, 5);
        CHECK(rep.lhs == 0.0);
        CHECK(rep.rhs == 0.0);
        CHECK(rep.holds);
    }
    SUBCASE("compensated Poisson with unit jumps") {
        const auto rep = martingale_sup_check(
            Driver::compensated_poisson(1.0, JumpLaw::constant(1.0)), 1.0, 64, 4000, 5);
        CHECK(rep.rhs == doctest::Approx(3.0));
        CHECK(rep.holds);
    }
}

TEST_CASE("investment scenario") {
    SUBCASE("no noise, no jumps, admissible interior start stays put") {
        InvestmentParams params;
        params.x0 = 1.0;
        params.drift = 0.0;
        params.volatility = 0.0;
        params.h = make_concave(0.5);
        params.steps_per_unit = 50;
        params.horizon = 1.0;
        params.particles = 10;
        const auto grid = TimeGrid::uniform(params.steps_per_unit, params.horizon);
        params.barriers = const_band(grid, 0.2, 1.4);
        const InvestmentResult result = investment_scenario(params);
        for (std::size_t j = 0; j < grid->size(); ++j) {
            CHECK(result.sim.solution.k.value(j) == 0.0);
            CHECK(result.sim.solution.x_mean.value(j) == 1.0);
            CHECK(result.stock_mean.value(j) == 1.0);
        }
        CHECK(result.max_replication_gap <= 1e-12);
    }
    SUBCASE("rising floor with pure volatility injects money at the closed-form rate") {
        InvestmentParams params;
        params.x0 = 1.0;
        params.drift = 0.0;
        params.volatility = 0.25;
        params.h = make_identity();
        params.steps_per_unit = 100;
        params.horizon = 1.0;
        params.particles = 20000;
        const auto grid = TimeGrid::uniform(params.steps_per_unit, params.horizon);
        params.barriers.lower = PiecewiseSpec::linear(1.0, 0.4).sample(grid);
        const InvestmentResult result = investment_scenario(params);
        const double root_n = std::sqrt(static_cast<double>(params.particles));
        for (std::size_t j = 0; j < grid->size(); ++j) {
            const double t = grid->point(j);
            const double slack = 4.0 * result.sim.solution.x_std.value(j) / root_n + 1e-12;
            CHECK(std::fabs(result.sim.solution.k.value(j) - 0.4 * t) <= slack);
        }
        CHECK(result.max_replication_gap <= 1e-12);
    }
    SUBCASE("full scenario with reserve jumps keeps the constraint in the band") {
        InvestmentParams params;
        params.x0 = 1.0;
        params.drift = 0.05;
        params.volatility = 0.2;
        params.reserve_jumps = CompoundPoissonSpec{1.0, JumpLaw::uniform(-0.1, 0.1)};
        params.h = make_concave(0.5);
        params.steps_per_unit = 100;
        params.horizon = 1.0;
        params.particles = 4000;
        const auto grid = TimeGrid::uniform(params.steps_per_unit, params.horizon);
        params.barriers = const_band(grid, 0.68, 1.5);
        const InvestmentResult result = investment_scenario(params);
        const double eps = 2.0 * params.tol;
        for (std::size_t j = 0; j < grid->size(); ++j) {
            CHECK(result.sim.solution.eh.value(j) >= 0.68 - eps);
            CHECK(result.sim.solution.eh.value(j) <= 1.5 + eps);
            // wealth path identity: V = x_mean - k
            CHECK(result.wealth_mean.value(j) ==
                  doctest::Approx(result.sim.solution.x_mean.value(j) -
                                  result.sim.solution.k.value(j)));
        }
        CHECK(result.max_replication_gap <= 1e-12);
    }
}

TEST_CASE("grid-refinement study") {
    SUBCASE("single resolution produces one row and no monotonicity verdict") {
        SimulationConfig cfg = base_config();
        cfg.x0 = X0Sampler::constant(1.0);
        cfg.horizon = 2.0;
        cfg.particles = 50;
        cfg.coefficients = make_coefficients({"zero"}, {"constant", -1.0}, 2.0);
        const auto grid = TimeGrid::uniform(64, cfg.horizon);
        cfg.barriers.lower = GridPath::constant(grid, 0.0);
        const ConvergenceTable table = convergence_study(cfg, {16}, 64);
        CHECK(table.rows.size() == 1);
        CHECK(table.monotone_ok);
    }
    SUBCASE("closed-form drift scenario is exact at every resolution") {
        SimulationConfig cfg = base_config();
        cfg.x0 = X0Sampler::constant(1.0);
        cfg.horizon = 2.0;
        cfg.particles = 20;
        cfg.coefficients = make_coefficients({"zero"}, {"constant", -1.0}, 2.0);
        const auto grid = TimeGrid::uniform(64, cfg.horizon);
        cfg.barriers.lower = GridPath::constant(grid, 0.0);
        const ConvergenceTable table = convergence_study(cfg, {8, 16, 32}, 64);
        for (const auto& row : table.rows) CHECK(row.err_k <= 1e-12);
        CHECK(table.monotone_ok);
    }
    SUBCASE("Brownian scenario errors shrink with refinement") {
        SimulationConfig cfg = base_config();
        cfg.x0 = X0Sampler::constant(1.0);
        cfg.horizon = 1.0;
        cfg.particles = 4000;
        cfg.coefficients = make_coefficients({"constant", 0.5}, {"ramp", -0.6}, 2.0);
        cfg.driver = Driver::pii(1.0, true, std::nullopt);
        const auto grid = TimeGrid::uniform(64, cfg.horizon);
        cfg.barriers.lower = GridPath::constant(grid, 0.7);
        const ConvergenceTable table = convergence_study(cfg, {16, 32, 64, 128}, 512);
        CHECK(table.monotone_ok);
        CHECK(table.rows.back().err_k < table.rows.front().err_k);
    }
    SUBCASE("reference resolution must be a common multiple") {
        SimulationConfig cfg = base_config();
        CHECK_THROWS_AS(convergence_study(cfg, {24}, 100), InvalidArgumentError);
    }
}

TEST_CASE("admissibility is rejected at step zero") {
    SimulationConfig cfg = base_config();
    cfg.x0 = X0Sampler::constant(5.0);
    const auto grid = TimeGrid::uniform(cfg.steps_per_unit, cfg.horizon);
    cfg.barriers = const_band(grid, -1.0, 1.0);
    CHECK_THROWS_AS(euler_mean_reflected(cfg), ConstraintViolationError);
}
