#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "meanreflect/mean_sp.hpp"
#include "meanreflect/rng.hpp"

namespace meanreflect {

// Bounded jump-size laws for compound-Poisson parts.
struct JumpLaw {
    enum class Kind { constant, uniform };
    Kind kind = Kind::constant;
    double a = 0.0;  // constant value, or lower end
    double b = 0.0;  // upper end (uniform)

    static JumpLaw constant(double value) { return {Kind::constant, value, value}; }
    static JumpLaw uniform(double lo, double hi);

    double mean() const;
    double abs_mean() const;
    double second_moment() const;
    double bound() const;  // sup |J|
    double sample(rng::Key key) const;
    std::string describe() const;
};

struct CompoundPoissonSpec {
    double rate = 1.0;
    JumpLaw law;
};

// Driving pair (M, V): Brownian and compensated compound-Poisson martingale
// parts, deterministic clock and the jump compensator in V. The predictable
// characteristics of every shipped driver grow linearly, so the dominating
// function is m_t = m_slope * t.
struct Driver {
    std::string name = "clock";
    double brownian_scale = 0.0;
    bool clock = false;
    std::optional<CompoundPoissonSpec> cpois;

    static Driver brownian(double scale = 1.0);
    static Driver deterministic_clock();
    static Driver compensated_poisson(double rate, JumpLaw law);
    // Semimartingale with independent increments split into deterministic
    // drift (clock) plus martingale parts.
    static Driver pii(double brownian_scale, bool clock,
                      std::optional<CompoundPoissonSpec> cpois);

    bool has_martingale() const { return brownian_scale != 0.0 || cpois.has_value(); }
    double quadratic_slope() const;  // <M>_t / t
    double variation_slope() const;  // bound on |~V|_t / t
    double m_slope() const;
    GridPath m_path(TimeGridPtr grid) const;
};

// Per-particle (dM, dV) increments over one coarse step, generated at a fine
// resolution and aggregated exactly. Purely counter-based: any (particle,
// step) can be regenerated independently.
class IncrementSampler {
public:
    IncrementSampler(const Driver& driver, std::uint64_t seed, long n_fine, long factor);

    // Coarse step index J covers fine steps [J*factor, (J+1)*factor).
    void sample(std::uint64_t particle, long coarse_step, double& dm, double& dv) const;

    // Same aggregation for an additive compound-Poisson channel (raw jumps,
    // unit coefficient); uses a disjoint slot range.
    double sample_additive(const CompoundPoissonSpec& spec, std::uint64_t particle,
                           long coarse_step) const;

private:
    Driver driver_;
    std::uint64_t seed_;
    long n_fine_;
    long factor_;
};

// Equation coefficients with declared (A1)/(A2) constants.
struct CoeffSpec {
    std::string kind = "zero";  // zero | constant | linear | affine | ramp
    double a = 0.0;             // constant value, slope of linear/affine/ramp
    double b = 0.0;             // intercept of affine
};

struct Coefficients {
    std::function<double(double, double)> f;  // multiplies dM
    std::function<double(double, double)> g;  // multiplies dV
    double growth = 0.0;     // mu: |f| + |g| <= mu (1 + |x|) for t <= t_max
    double lipschitz = 0.0;  // c: |f(t,x)-f(t,y)| + |g(t,x)-g(t,y)| <= c |x-y|
    CoeffSpec f_spec, g_spec;
    double t_max = 10.0;
};

Coefficients make_coefficients(const CoeffSpec& f, const CoeffSpec& g, double t_max);
void audit_coefficients(const Coefficients& c);

struct X0Sampler {
    enum class Kind { constant, uniform, gaussian };
    Kind kind = Kind::constant;
    double p1 = 0.0;  // value | lower | mean
    double p2 = 0.0;  // unused | upper | stddev

    static X0Sampler constant(double v) { return {Kind::constant, v, v}; }
    static X0Sampler uniform(double lo, double hi) { return {Kind::uniform, lo, hi}; }
    static X0Sampler gaussian(double mean, double stddev) {
        return {Kind::gaussian, mean, stddev};
    }

    bool deterministic() const { return kind == Kind::constant; }
    double sample(std::uint64_t seed, std::uint64_t particle) const;
    std::string describe() const;
};

struct SimulationConfig {
    X0Sampler x0;
    long steps_per_unit = 100;  // n
    double horizon = 1.0;       // q
    std::size_t particles = 1000;
    std::uint64_t seed = 1;
    double tol = 1e-10;
    double picard_tol = 1e-6;
    Coefficients coefficients;
    Driver driver;
    std::optional<CompoundPoissonSpec> additive;  // unit-coefficient jump channel
    ConstraintFunction h;
    BarrierPair barriers;  // on any grid; resampled to the scheme grid
    bool keep_particles = false;
};

struct StepDiagnostics {
    std::vector<double> step_seconds;
    double wall_seconds = 0.0;
};

struct SimResult {
    MeanSolution solution;
    StepDiagnostics diagnostics;
};

// Observer hook invoked after every completed step with the per-particle
// martingale increments of that step and the reflected state.
using StepObserver = std::function<void(std::size_t step, double t,
                                        const std::vector<double>& dm,
                                        const std::vector<double>& x)>;

// Explicit scheme for the mean-reflected equation: per step, advance every
// particle with coefficients evaluated at the right endpoint time and the
// left state, transform the barrier values on the new ensemble, clamp the
// compensating path, shift.
SimResult euler_mean_reflected(const SimulationConfig& cfg, const StepObserver& observer = {});

// Fixed-point construction: partitions the horizon into contraction
// intervals from the driver's dominating function and the declared
// constants, iterates the solution map on each interval to the requested
// tolerance, and closes each interval with the clamp formula at its right
// endpoint.
struct PicardIntervalLog {
    double t_begin = 0.0, t_end = 0.0;
    int iterations = 0;
    double max_ratio = 0.0;  // 0 when fewer than two contraction steps ran
};

struct PicardResult {
    MeanSolution solution;
    std::vector<PicardIntervalLog> intervals;
};

PicardResult picard_solve(const SimulationConfig& cfg);

// Monte Carlo check of the maximal-inequality diagnostic for the driver's
// martingale part on [0, t).
struct MartingaleSupReport {
    double lhs = 0.0;       // mean sup_{s<t} |M_s|
    double rhs = 0.0;       // 3 sqrt(<M>_{t-})
    double mc_slack = 0.0;  // 3 sigma_hat / sqrt(N)
    bool holds = false;
};

MartingaleSupReport martingale_sup_check(const Driver& driver, double t, long n,
                                         std::size_t particles, std::uint64_t seed);

// Investment scenario: stock position X with multiplicative noise, additive
// risk-reserve jumps and a mean risk constraint; emits the stock, strategy
// and wealth paths alongside the reflected solution.
struct InvestmentParams {
    double x0 = 1.0;  // initial stock position
    double s0 = 1.0;  // initial stock price
    double drift = 0.05;
    double volatility = 0.2;
    std::optional<CompoundPoissonSpec> reserve_jumps;
    ConstraintFunction h;
    BarrierPair barriers;
    long steps_per_unit = 100;
    double horizon = 1.0;
    std::size_t particles = 1000;
    std::uint64_t seed = 1;
    double tol = 1e-10;
};

struct InvestmentResult {
    SimResult sim;
    GridPath stock_mean;
    GridPath strategy_mean;     // mean of pi = X / S
    GridPath wealth_mean;       // mean of -k + pi S
    double max_replication_gap; // max |pi S - X| over particles and times
};

InvestmentResult investment_scenario(const InvestmentParams& params);

// Grid-refinement study under common refined increments: every run draws its
// increments on the reference grid and aggregates them, so differences are
// purely discretization effects.
struct ConvergenceRow {
    long n = 0;
    double err_k = 0.0;
    double err_x = 0.0;
};

struct ConvergenceTable {
    std::vector<ConvergenceRow> rows;
    bool monotone_ok = true;  // non-increasing within a 20% allowance
};

ConvergenceTable convergence_study(const SimulationConfig& cfg, const std::vector<long>& n_list,
                                   long reference_n);

}  // namespace meanreflect
