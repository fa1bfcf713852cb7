#include "meanreflect/sde.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "meanreflect/errors.hpp"
#include "meanreflect/parallel.hpp"

namespace meanreflect {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::uint32_t kSlotBrownian = 0;
constexpr std::uint32_t kSlotPoissonCount = 1;
constexpr std::uint32_t kSlotJumpBase = 2;
constexpr std::uint32_t kSlotAdditiveBase = 1u << 20;

double now_seconds() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

}  // namespace

JumpLaw JumpLaw::uniform(double lo, double hi) {
    if (!(lo < hi)) throw InvalidArgumentError("uniform jump law needs lo < hi");
    return {Kind::uniform, lo, hi};
}

double JumpLaw::mean() const {
    return kind == Kind::constant ? a : 0.5 * (a + b);
}

double JumpLaw::abs_mean() const {
    if (kind == Kind::constant) return std::fabs(a);
    if (a >= 0.0) return 0.5 * (a + b);
    if (b <= 0.0) return -0.5 * (a + b);
    return 0.5 * (a * a + b * b) / (b - a);
}

double JumpLaw::second_moment() const {
    if (kind == Kind::constant) return a * a;
    return (a * a + a * b + b * b) / 3.0;
}

double JumpLaw::bound() const { return std::max(std::fabs(a), std::fabs(b)); }

double JumpLaw::sample(rng::Key key) const {
    return kind == Kind::constant ? a : rng::uniform(key, a, b);
}

std::string JumpLaw::describe() const {
    if (kind == Kind::constant) return "constant(" + std::to_string(a) + ")";
    return "uniform(" + std::to_string(a) + "," + std::to_string(b) + ")";
}

Driver Driver::brownian(double scale) {
    Driver d;
    d.name = "brownian";
    d.brownian_scale = scale;
    return d;
}

Driver Driver::deterministic_clock() {
    Driver d;
    d.name = "clock";
    d.clock = true;
    return d;
}

Driver Driver::compensated_poisson(double rate, JumpLaw law) {
    if (!(rate > 0.0)) throw InvalidArgumentError("Poisson rate must be positive");
    Driver d;
    d.name = "cpois";
    d.cpois = CompoundPoissonSpec{rate, law};
    return d;
}

Driver Driver::pii(double brownian_scale, bool clock, std::optional<CompoundPoissonSpec> cpois) {
    Driver d;
    d.name = "pii";
    d.brownian_scale = brownian_scale;
    d.clock = clock;
    d.cpois = std::move(cpois);
    return d;
}

double Driver::quadratic_slope() const {
    double s = brownian_scale * brownian_scale;
    if (cpois) s += cpois->rate * cpois->law.second_moment();
    return s;
}

double Driver::variation_slope() const {
    double s = clock ? 1.0 : 0.0;
    if (cpois) s += cpois->rate * cpois->law.abs_mean();
    return s;
}

double Driver::m_slope() const { return std::max(quadratic_slope(), variation_slope()); }

GridPath Driver::m_path(TimeGridPtr grid) const {
    const double slope = m_slope();
    std::vector<double> vals(grid->size());
    for (std::size_t i = 0; i < vals.size(); ++i) vals[i] = slope * grid->point(i);
    return GridPath(std::move(grid), std::move(vals));
}

IncrementSampler::IncrementSampler(const Driver& driver, std::uint64_t seed, long n_fine,
                                   long factor)
    : driver_(driver), seed_(seed), n_fine_(n_fine), factor_(factor) {
    if (n_fine < 1 || factor < 1) throw InvalidArgumentError("bad sampler resolution");
}

void IncrementSampler::sample(std::uint64_t particle, long coarse_step, double& dm,
                              double& dv) const {
    dm = 0.0;
    dv = 0.0;
    const double dt = 1.0 / static_cast<double>(n_fine_);
    const double sqrt_dt = std::sqrt(dt);
    for (long j = coarse_step * factor_; j < (coarse_step + 1) * factor_; ++j) {
        const auto step = static_cast<std::uint32_t>(j);
        if (driver_.brownian_scale != 0.0) {
            dm += driver_.brownian_scale * sqrt_dt *
                  rng::normal01({seed_, particle, step, kSlotBrownian});
        }
        if (driver_.cpois) {
            const double jump_mean = driver_.cpois->rate * dt;
            const std::uint64_t count =
                rng::poisson({seed_, particle, step, kSlotPoissonCount}, jump_mean);
            double raw = 0.0;
            for (std::uint64_t m = 0; m < count; ++m)
                raw += driver_.cpois->law.sample(
                    {seed_, particle, step, kSlotJumpBase + static_cast<std::uint32_t>(m)});
            const double compensator = driver_.cpois->rate * driver_.cpois->law.mean() * dt;
            dm += raw - compensator;
            dv += compensator;
        }
        if (driver_.clock) dv += dt;
    }
}

double IncrementSampler::sample_additive(const CompoundPoissonSpec& spec,
                                         std::uint64_t particle, long coarse_step) const {
    double da = 0.0;
    const double dt = 1.0 / static_cast<double>(n_fine_);
    for (long j = coarse_step * factor_; j < (coarse_step + 1) * factor_; ++j) {
        const auto step = static_cast<std::uint32_t>(j);
        const std::uint64_t count =
            rng::poisson({seed_, particle, step, kSlotAdditiveBase}, spec.rate * dt);
        for (std::uint64_t m = 0; m < count; ++m)
            da += spec.law.sample({seed_, particle, step,
                                   kSlotAdditiveBase + 1 + static_cast<std::uint32_t>(m)});
    }
    return da;
}

namespace {

std::function<double(double, double)> build_coeff(const CoeffSpec& s) {
    if (s.kind == "zero") return [](double, double) { return 0.0; };
    if (s.kind == "constant") {
        const double v = s.a;
        return [v](double, double) { return v; };
    }
    if (s.kind == "linear") {
        const double a = s.a;
        return [a](double, double x) { return a * x; };
    }
    if (s.kind == "affine") {
        const double a = s.a, b = s.b;
        return [a, b](double, double x) { return a * x + b; };
    }
    if (s.kind == "ramp") {
        const double a = s.a;
        return [a](double t, double) { return a * t; };
    }
    throw InvalidArgumentError("unknown coefficient kind '" + s.kind + "'");
}

double coeff_growth(const CoeffSpec& s, double t_max) {
    if (s.kind == "zero") return 0.0;
    if (s.kind == "constant") return std::fabs(s.a);
    if (s.kind == "linear") return std::fabs(s.a);
    if (s.kind == "affine") return std::max(std::fabs(s.a), std::fabs(s.b));
    if (s.kind == "ramp") return std::fabs(s.a) * t_max;
    throw InvalidArgumentError("unknown coefficient kind '" + s.kind + "'");
}

double coeff_lipschitz(const CoeffSpec& s) {
    if (s.kind == "linear" || s.kind == "affine") return std::fabs(s.a);
    return 0.0;
}

}  // namespace

Coefficients make_coefficients(const CoeffSpec& f, const CoeffSpec& g, double t_max) {
    Coefficients c;
    c.f = build_coeff(f);
    c.g = build_coeff(g);
    c.f_spec = f;
    c.g_spec = g;
    c.t_max = t_max;
    c.growth = coeff_growth(f, t_max) + coeff_growth(g, t_max) + 1e-12;
    c.lipschitz = coeff_lipschitz(f) + coeff_lipschitz(g);
    return c;
}

void audit_coefficients(const Coefficients& c) {
    const int nt = 11, nx = 201;
    for (int it = 0; it < nt; ++it) {
        const double t = c.t_max * it / (nt - 1);
        double prev_f = c.f(t, -8.0), prev_g = c.g(t, -8.0), prev_x = -8.0;
        for (int ix = 0; ix < nx; ++ix) {
            const double x = -8.0 + 16.0 * ix / (nx - 1);
            const double fv = c.f(t, x), gv = c.g(t, x);
            if (std::fabs(fv) + std::fabs(gv) >
                c.growth * (1.0 + std::fabs(x)) * (1.0 + 1e-9))
                throw InvalidArgumentError("coefficient growth constant violated");
            if (ix > 0) {
                const double lip =
                    (std::fabs(fv - prev_f) + std::fabs(gv - prev_g)) / (x - prev_x);
                if (lip > c.lipschitz * (1.0 + 1e-9) + 1e-12)
                    throw InvalidArgumentError("coefficient Lipschitz constant violated");
            }
            prev_f = fv;
            prev_g = gv;
            prev_x = x;
        }
    }
}

double X0Sampler::sample(std::uint64_t seed, std::uint64_t particle) const {
    const rng::Key key{seed, particle, rng::kInitStep, 0};
    switch (kind) {
        case Kind::constant: return p1;
        case Kind::uniform: return rng::uniform(key, p1, p2);
        case Kind::gaussian: return p1 + p2 * rng::normal01(key);
    }
    return p1;
}

std::string X0Sampler::describe() const {
    switch (kind) {
        case Kind::constant: return "constant(" + std::to_string(p1) + ")";
        case Kind::uniform:
            return "uniform(" + std::to_string(p1) + "," + std::to_string(p2) + ")";
        case Kind::gaussian:
            return "gaussian(" + std::to_string(p1) + "," + std::to_string(p2) + ")";
    }
    return "constant";
}

namespace {

// Shared state of one explicit-scheme run at a coarse resolution, with
// increments drawn on the fine grid and aggregated.
struct EulerCore {
    const SimulationConfig& cfg;
    TimeGridPtr grid;
    IncrementSampler sampler;
    Barrier lower, upper;
    std::vector<double> y_particles;  // running unreflected values
    std::vector<double> x_particles;  // running reflected values
    std::vector<double> dm_buf, shifted_buf;
    double k = 0.0;
    std::size_t step_index = 0;

    // Per-step records of the latest step.
    double lbar = -kInf, ubar = kInf, y_mean = 0.0, eh = 0.0, x_mean = 0.0, x_std = 0.0;

    EulerCore(const SimulationConfig& c, long n_coarse, long n_fine)
        : cfg(c),
          grid(TimeGrid::uniform(n_coarse, c.horizon)),
          sampler(c.driver, c.seed, n_fine, n_fine / n_coarse) {
        if (n_fine % n_coarse != 0)
            throw InvalidArgumentError("fine resolution must be a multiple of the coarse one");
        if (cfg.barriers.lower) lower = cfg.barriers.lower->resample(grid);
        if (cfg.barriers.upper) upper = cfg.barriers.upper->resample(grid);
        const std::size_t n = cfg.particles;
        if (n == 0) throw InvalidArgumentError("particle count must be positive");
        y_particles.resize(n);
        for (std::size_t i = 0; i < n; ++i) y_particles[i] = cfg.x0.sample(cfg.seed, i);
        x_particles = y_particles;
        dm_buf.resize(n);
        shifted_buf.resize(n);
        check_admissibility();
        refresh_records(0.0);
    }

    void check_admissibility() {
        std::vector<double> h0(y_particles.size());
        for (std::size_t i = 0; i < h0.size(); ++i) h0[i] = cfg.h(0.0, y_particles[i]);
        const double eh0 = mean(h0);
        double slack = 2.0 * cfg.tol;
        if (!cfg.x0.deterministic())
            slack += 3.0 * stddev(h0, eh0) / std::sqrt(static_cast<double>(h0.size()));
        const double l0 = lower ? lower->value(0) : -kInf;
        const double u0 = upper ? upper->value(0) : kInf;
        if (eh0 < l0 - slack || eh0 > u0 + slack)
            throw ConstraintViolationError(
                "initial ensemble violates the mean constraint: mean h(0,X0)=" +
                    std::to_string(eh0),
                0.0);
    }

    void refresh_records(double t) {
        Ensemble ens(y_particles);
        y_mean = ens.mean();
        if (lower)
            lbar = mean_level_inverse(cfg.h, t, lower->value(step_index), ens, cfg.tol);
        if (upper) {
            ubar = mean_level_inverse(cfg.h, t, upper->value(step_index), ens, cfg.tol);
            if (lower && ubar < lbar) ubar = lbar;
        }
        for (std::size_t i = 0; i < x_particles.size(); ++i) shifted_buf[i] = x_particles[i];
        x_mean = mean(shifted_buf);
        x_std = stddev(shifted_buf, x_mean);
        for (std::size_t i = 0; i < x_particles.size(); ++i)
            shifted_buf[i] = cfg.h(t, x_particles[i]);
        eh = mean(shifted_buf);
    }

    // Advances one coarse step; afterwards step_index points at the new time.
    void advance() {
        ++step_index;
        const double t = grid->point(step_index);
        const long inc_step = static_cast<long>(step_index) - 1;
        const auto& ffn = cfg.coefficients.f;
        const auto& gfn = cfg.coefficients.g;
        parallel_for(y_particles.size(), [&](std::size_t begin, std::size_t end) {
            for (std::size_t i = begin; i < end; ++i) {
                double dm, dv;
                sampler.sample(i, inc_step, dm, dv);
                double dy = ffn(t, x_particles[i]) * dm + gfn(t, x_particles[i]) * dv;
                if (cfg.additive) dy += sampler.sample_additive(*cfg.additive, i, inc_step);
                y_particles[i] += dy;
                dm_buf[i] = dm;
            }
        });
        Ensemble ens(y_particles);
        y_mean = ens.mean();
        lbar = -kInf;
        ubar = kInf;
        if (lower)
            lbar = mean_level_inverse(cfg.h, t, lower->value(step_index), ens, cfg.tol);
        if (upper) {
            ubar = mean_level_inverse(cfg.h, t, upper->value(step_index), ens, cfg.tol);
            if (lower && ubar < lbar) ubar = lbar;
        }
        double kj = k;
        if (upper) kj = std::min(kj, ubar - y_mean);
        if (lower) kj = std::max(kj, lbar - y_mean);
        k = kj;
        parallel_for(y_particles.size(), [&](std::size_t begin, std::size_t end) {
            for (std::size_t i = begin; i < end; ++i) x_particles[i] = y_particles[i] + kj;
        });
        for (std::size_t i = 0; i < x_particles.size(); ++i) shifted_buf[i] = x_particles[i];
        x_mean = mean(shifted_buf);
        x_std = stddev(shifted_buf, x_mean);
        for (std::size_t i = 0; i < x_particles.size(); ++i)
            shifted_buf[i] = cfg.h(t, x_particles[i]);
        eh = mean(shifted_buf);
    }
};

MeanSolution assemble_solution(const SimulationConfig& cfg, TimeGridPtr grid,
                               std::vector<double> y, std::vector<double> k,
                               std::vector<double> lbar, std::vector<double> ubar,
                               std::vector<double> eh, std::vector<double> xm,
                               std::vector<double> xs, std::vector<Ensemble> slices) {
    MeanSolution sol;
    sol.grid = grid;
    sol.tol = cfg.tol;
    sol.y = GridPath(grid, std::move(y));
    sol.k = GridPath(grid, std::move(k));
    sol.eh = GridPath(grid, std::move(eh));
    sol.x_mean = GridPath(grid, std::move(xm));
    sol.x_std = GridPath(grid, std::move(xs));
    if (cfg.barriers.lower) {
        sol.barriers.lower = cfg.barriers.lower->resample(grid);
        sol.transformed.lower = GridPath(grid, std::move(lbar));
    }
    if (cfg.barriers.upper) {
        sol.barriers.upper = cfg.barriers.upper->resample(grid);
        sol.transformed.upper = GridPath(grid, std::move(ubar));
    }
    sol.x_slices = std::move(slices);
    return sol;
}

}  // namespace

SimResult euler_mean_reflected(const SimulationConfig& cfg, const StepObserver& observer) {
    const double t_start = now_seconds();
    EulerCore core(cfg, cfg.steps_per_unit, cfg.steps_per_unit);
    const std::size_t n = core.grid->size();
    std::vector<double> y(n), k(n), lbar(n), ubar(n), eh(n), xm(n), xs(n);
    std::vector<Ensemble> slices;
    if (cfg.keep_particles) slices.reserve(n);
    StepDiagnostics diag;
    diag.step_seconds.reserve(n - 1);

    auto record = [&](std::size_t j) {
        y[j] = core.y_mean;
        k[j] = core.k;
        lbar[j] = core.lbar;
        ubar[j] = core.ubar;
        eh[j] = core.eh;
        xm[j] = core.x_mean;
        xs[j] = core.x_std;
        if (cfg.keep_particles) slices.emplace_back(core.x_particles);
    };
    record(0);
    for (std::size_t j = 1; j < n; ++j) {
        const double t0 = now_seconds();
        core.advance();
        record(j);
        if (observer) observer(j, core.grid->point(j), core.dm_buf, core.x_particles);
        diag.step_seconds.push_back(now_seconds() - t0);
    }
    diag.wall_seconds = now_seconds() - t_start;
    return {assemble_solution(cfg, core.grid, std::move(y), std::move(k), std::move(lbar),
                              std::move(ubar), std::move(eh), std::move(xm), std::move(xs),
                              std::move(slices)),
            std::move(diag)};
}

PicardResult picard_solve(const SimulationConfig& cfg) {
    const TimeGridPtr grid = TimeGrid::uniform(cfg.steps_per_unit, cfg.horizon);
    const std::size_t steps = grid->size() - 1;
    const std::size_t npart = cfg.particles;
    Barrier lower = cfg.barriers.lower
                        ? Barrier(cfg.barriers.lower->resample(grid))
                        : std::nullopt;
    Barrier upper = cfg.barriers.upper
                        ? Barrier(cfg.barriers.upper->resample(grid))
                        : std::nullopt;

    // Contraction partition from the dominating function of the driver.
    const GridPath m_path = cfg.driver.m_path(grid);
    const double stab = ConstraintFunction::stability_constant(cfg.h, cfg.h);
    const double lip = cfg.coefficients.lipschitz;
    auto contraction_factor = [&](double dm) {
        return (stab + 1.0) * lip * std::max(dm, 3.0 * std::sqrt(std::max(dm, 0.0)));
    };
    std::vector<std::size_t> ends;
    for (std::size_t a = 0; a < steps;) {
        std::size_t b = a + 1;
        if (lip > 0.0) {
            while (b < steps &&
                   contraction_factor(m_path.value(b) - m_path.value(a)) <= 0.5)
                ++b;
        } else {
            b = steps;
        }
        ends.push_back(b);
        a = b;
    }
    const double interval_tol =
        std::max(cfg.picard_tol / (4.0 * static_cast<double>(ends.size())), 30.0 * cfg.tol);

    // Initial ensemble (same draws as the explicit scheme).
    std::vector<double> y_run(npart), x_run(npart);
    for (std::size_t i = 0; i < npart; ++i) y_run[i] = cfg.x0.sample(cfg.seed, i);
    x_run = y_run;
    {
        std::vector<double> h0(npart);
        for (std::size_t i = 0; i < npart; ++i) h0[i] = cfg.h(0.0, y_run[i]);
        const double eh0 = mean(h0);
        double slack = 2.0 * cfg.tol;
        if (!cfg.x0.deterministic())
            slack += 3.0 * stddev(h0, eh0) / std::sqrt(static_cast<double>(npart));
        const double l0 = lower ? lower->value(0) : -kInf;
        const double u0 = upper ? upper->value(0) : kInf;
        if (eh0 < l0 - slack || eh0 > u0 + slack)
            throw ConstraintViolationError("initial ensemble violates the mean constraint",
                                           0.0);
    }

    const IncrementSampler sampler(cfg.driver, cfg.seed, cfg.steps_per_unit, 1);
    std::vector<double> y(grid->size()), k(grid->size()), lbar(grid->size(), -kInf),
        ubar(grid->size(), kInf), eh(grid->size()), xm(grid->size()), xs(grid->size());
    std::vector<Ensemble> slices;
    if (cfg.keep_particles) slices.reserve(grid->size());

    auto record_row = [&](std::size_t j, const std::vector<double>& xrow, double kj) {
        std::vector<double> buf(xrow);
        xm[j] = mean(buf);
        xs[j] = stddev(buf, xm[j]);
        for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = cfg.h(grid->point(j), xrow[i]);
        eh[j] = mean(buf);
        k[j] = kj;
        if (cfg.keep_particles) slices.emplace_back(xrow);
    };

    // Row 0.
    {
        Ensemble ens(y_run);
        y[0] = ens.mean();
        if (lower) lbar[0] = mean_level_inverse(cfg.h, 0.0, lower->value(0), ens, cfg.tol);
        if (upper) {
            ubar[0] = mean_level_inverse(cfg.h, 0.0, upper->value(0), ens, cfg.tol);
            if (lower && ubar[0] < lbar[0]) ubar[0] = lbar[0];
        }
        record_row(0, x_run, 0.0);
    }

    std::vector<PicardIntervalLog> logs;
    logs.reserve(ends.size());
    double k_run = 0.0;
    std::size_t a = 0;
    for (const std::size_t b : ends) {
        const std::size_t len = b - a;
        // Increments are iteration-invariant: draw them once per interval.
        std::vector<std::vector<double>> dm(len, std::vector<double>(npart));
        std::vector<std::vector<double>> dv(len, std::vector<double>(npart));
        std::vector<std::vector<double>> da;
        if (cfg.additive) da.assign(len, std::vector<double>(npart));
        for (std::size_t s = 0; s < len; ++s) {
            const long inc_step = static_cast<long>(a + s);
            parallel_for(npart, [&](std::size_t begin, std::size_t end_i) {
                for (std::size_t i = begin; i < end_i; ++i) {
                    sampler.sample(i, inc_step, dm[s][i], dv[s][i]);
                    if (cfg.additive)
                        da[s][i] = sampler.sample_additive(*cfg.additive, i, inc_step);
                }
            });
        }

        std::vector<std::vector<double>> x_prev(len, x_run);  // constant extension
        std::vector<std::vector<double>> z(len, std::vector<double>(npart));
        std::vector<std::vector<double>> x_next(len, std::vector<double>(npart));
        std::vector<double> k_loc(len), lb_loc(len, -kInf), ub_loc(len, kInf), y_loc(len);

        PicardIntervalLog log;
        log.t_begin = grid->point(a);
        log.t_end = grid->point(b);
        double prev_diff = -1.0;
        int high_ratio_streak = 0;
        for (int iter = 0; iter < 500; ++iter) {
            ++log.iterations;
            for (std::size_t s = 0; s < len; ++s) {
                const double t = grid->point(a + s + 1);
                const std::vector<double>& state =
                    s == 0 ? x_run : x_prev[s - 1];
                const std::vector<double>& base = s == 0 ? y_run : z[s - 1];
                auto& row = z[s];
                const auto& ffn = cfg.coefficients.f;
                const auto& gfn = cfg.coefficients.g;
                parallel_for(npart, [&](std::size_t begin, std::size_t end_i) {
                    for (std::size_t i = begin; i < end_i; ++i) {
                        row[i] = base[i] + ffn(t, state[i]) * dm[s][i] +
                                 gfn(t, state[i]) * dv[s][i];
                        if (cfg.additive) row[i] += da[s][i];
                    }
                });
                Ensemble ens(row);
                y_loc[s] = ens.mean();
                if (lower)
                    lb_loc[s] =
                        mean_level_inverse(cfg.h, t, lower->value(a + s + 1), ens, cfg.tol);
                if (upper) {
                    ub_loc[s] =
                        mean_level_inverse(cfg.h, t, upper->value(a + s + 1), ens, cfg.tol);
                    if (lower && ub_loc[s] < lb_loc[s]) ub_loc[s] = lb_loc[s];
                }
                double kj = s == 0 ? k_run : k_loc[s - 1];
                if (upper) kj = std::min(kj, ub_loc[s] - y_loc[s]);
                if (lower) kj = std::max(kj, lb_loc[s] - y_loc[s]);
                k_loc[s] = kj;
                auto& xrow = x_next[s];
                parallel_for(npart, [&](std::size_t begin, std::size_t end_i) {
                    for (std::size_t i = begin; i < end_i; ++i) xrow[i] = row[i] + kj;
                });
            }
            if (len == 1) break;  // endpoint-only interval: one clamp pass
            // Contraction measured on the open part (all but the endpoint).
            std::vector<double> sup(npart, 0.0);
            for (std::size_t s = 0; s + 1 < len; ++s) {
                for (std::size_t i = 0; i < npart; ++i)
                    sup[i] = std::max(sup[i], std::fabs(x_next[s][i] - x_prev[s][i]));
            }
            const double diff = mean(sup);
            std::swap(x_prev, x_next);
            if (diff <= interval_tol) break;
            if (prev_diff > 0.0) {
                const double ratio = diff / prev_diff;
                log.max_ratio = std::max(log.max_ratio, ratio);
                high_ratio_streak = ratio > 0.9 ? high_ratio_streak + 1 : 0;
                if (high_ratio_streak >= 3)
                    throw NumericalFailureError(
                        "fixed-point iteration is not contracting (declared constants "
                        "are likely wrong)",
                        diff);
            }
            prev_diff = diff;
            if (log.iterations >= 499)
                throw NumericalFailureError("fixed-point iteration cap exceeded", diff);
        }
        const auto& x_final = (len == 1) ? x_next : x_prev;  // swapped after last pass
        for (std::size_t s = 0; s < len; ++s) {
            y[a + s + 1] = y_loc[s];
            lbar[a + s + 1] = lb_loc[s];
            ubar[a + s + 1] = ub_loc[s];
            record_row(a + s + 1, x_final[s], k_loc[s]);
        }
        y_run = z[len - 1];
        x_run = x_final[len - 1];
        k_run = k_loc[len - 1];
        logs.push_back(log);
        a = b;
    }

    PicardResult result;
    result.solution =
        assemble_solution(cfg, grid, std::move(y), std::move(k), std::move(lbar),
                          std::move(ubar), std::move(eh), std::move(xm), std::move(xs),
                          std::move(slices));
    result.intervals = std::move(logs);
    return result;
}

MartingaleSupReport martingale_sup_check(const Driver& driver, double t, long n,
                                         std::size_t particles, std::uint64_t seed) {
    if (!driver.has_martingale())
        return {0.0, 3.0 * std::sqrt(driver.quadratic_slope() * t), 0.0, true};
    Driver mart_only = driver;
    mart_only.clock = false;  // V does not enter M
    const IncrementSampler sampler(mart_only, seed, n, 1);
    const long steps = static_cast<long>(std::floor(t * static_cast<double>(n) + 1e-9));
    std::vector<double> sups(particles, 0.0);
    parallel_for(particles, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            double m = 0.0, sup = 0.0;
            for (long j = 0; j < steps; ++j) {
                sup = std::max(sup, std::fabs(m));  // value at t_j < t
                double dm, dv;
                sampler.sample(i, j, dm, dv);
                m += dm;
            }
            sups[i] = sup;
        }
    });
    MartingaleSupReport rep;
    rep.lhs = mean(sups);
    rep.rhs = 3.0 * std::sqrt(driver.quadratic_slope() * t);
    rep.mc_slack = 3.0 * stddev(sups, rep.lhs) / std::sqrt(static_cast<double>(particles));
    rep.holds = rep.lhs <= rep.rhs + rep.mc_slack;
    return rep;
}

InvestmentResult investment_scenario(const InvestmentParams& params) {
    SimulationConfig cfg;
    cfg.x0 = X0Sampler::constant(params.x0);
    cfg.steps_per_unit = params.steps_per_unit;
    cfg.horizon = params.horizon;
    cfg.particles = params.particles;
    cfg.seed = params.seed;
    cfg.tol = params.tol;
    cfg.coefficients = make_coefficients({"linear", params.volatility, 0.0},
                                         {"linear", params.drift, 0.0},
                                         std::max(params.horizon, 1.0));
    cfg.driver = Driver::pii(1.0, true, std::nullopt);
    cfg.additive = params.reserve_jumps;
    cfg.h = params.h;
    cfg.barriers = params.barriers;

    const double dt = 1.0 / static_cast<double>(params.steps_per_unit);
    std::vector<double> stock(params.particles, params.s0);
    std::vector<double> stock_mean, strategy_mean;
    double max_gap = 0.0;
    std::vector<double> buf(params.particles);

    StepObserver observer = [&](std::size_t, double, const std::vector<double>& dm,
                                const std::vector<double>& x) {
        for (std::size_t i = 0; i < stock.size(); ++i) {
            stock[i] *= 1.0 + params.drift * dt + params.volatility * dm[i];
            const double pi = x[i] / stock[i];
            buf[i] = pi;
            max_gap = std::max(max_gap, std::fabs(pi * stock[i] - x[i]));
        }
        strategy_mean.push_back(mean(buf));
        for (std::size_t i = 0; i < stock.size(); ++i) buf[i] = stock[i];
        stock_mean.push_back(mean(buf));
    };

    SimResult sim = euler_mean_reflected(cfg, observer);
    const TimeGridPtr grid = sim.solution.grid;
    std::vector<double> s_path(grid->size()), pi_path(grid->size()), w_path(grid->size());
    s_path[0] = params.s0;
    pi_path[0] = params.x0 / params.s0;
    for (std::size_t j = 1; j < grid->size(); ++j) {
        s_path[j] = stock_mean[j - 1];
        pi_path[j] = strategy_mean[j - 1];
    }
    for (std::size_t j = 0; j < grid->size(); ++j)
        w_path[j] = sim.solution.x_mean.value(j) - sim.solution.k.value(j);

    InvestmentResult out{std::move(sim), GridPath(grid, std::move(s_path)),
                         GridPath(grid, std::move(pi_path)), GridPath(grid, std::move(w_path)),
                         max_gap};
    return out;
}

ConvergenceTable convergence_study(const SimulationConfig& cfg, const std::vector<long>& n_list,
                                   long reference_n) {
    if (n_list.empty()) throw InvalidArgumentError("empty resolution list");
    for (long n : n_list) {
        if (n < 1 || reference_n % n != 0)
            throw InvalidArgumentError(
                "reference resolution must be a common refinement multiple of every n");
    }
    ConvergenceTable table;
    for (long n : n_list) {
        SimulationConfig coarse_cfg = cfg;
        coarse_cfg.steps_per_unit = n;
        EulerCore coarse(coarse_cfg, n, reference_n);
        EulerCore ref(cfg, reference_n, reference_n);
        const long factor = reference_n / n;
        double err_k = 0.0, err_x = 0.0;
        const std::size_t coarse_steps = coarse.grid->size() - 1;
        std::vector<double> absdiff(cfg.particles);
        for (std::size_t j = 1; j <= coarse_steps; ++j) {
            coarse.advance();
            for (long s = 0; s < factor; ++s) ref.advance();
            err_k = std::max(err_k, std::fabs(coarse.k - ref.k));
            for (std::size_t i = 0; i < cfg.particles; ++i)
                absdiff[i] = std::fabs(coarse.x_particles[i] - ref.x_particles[i]);
            err_x = std::max(err_x, mean(absdiff));
        }
        table.rows.push_back({n, err_k, err_x});
    }
    for (std::size_t r = 1; r < table.rows.size(); ++r) {
        if (table.rows[r].err_k > 1.2 * table.rows[r - 1].err_k) table.monotone_ok = false;
    }
    return table;
}

}  // namespace meanreflect
