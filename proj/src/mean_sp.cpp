#include "meanreflect/mean_sp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "meanreflect/errors.hpp"
#include "meanreflect/parallel.hpp"

namespace meanreflect {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double slice_constraint_mean(const ConstraintFunction& h, double t, const Ensemble& ens,
                             double shift) {
    const auto& ys = ens.particles();
    std::vector<double> buf(ys.size());
    parallel_for(ys.size(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) buf[i] = h(t, ys[i] + shift);
    });
    return mean(buf);
}

MeanSolution build_solution(const MeanProblem& p, const BarrierPair& transformed,
                            std::vector<double> k) {
    MeanSolution sol;
    sol.grid = p.law.grid;
    sol.y = p.law.mean_path();
    sol.transformed = transformed;
    sol.tol = p.tol;
    sol.barriers.lower =
        p.barriers.lower ? std::optional<GridPath>(p.barriers.lower->resample(sol.grid))
                         : std::nullopt;
    sol.barriers.upper =
        p.barriers.upper ? std::optional<GridPath>(p.barriers.upper->resample(sol.grid))
                         : std::nullopt;

    const std::size_t n = sol.grid->size();
    std::vector<double> eh(n), xm(n), xs(n);
    sol.x_slices.reserve(n);
    for (std::size_t j = 0; j < n; ++j) {
        const auto& ys = p.law.slices[j].particles();
        std::vector<double> shifted(ys.size());
        for (std::size_t i = 0; i < ys.size(); ++i) shifted[i] = ys[i] + k[j];
        Ensemble slice(std::move(shifted));
        eh[j] = slice_constraint_mean(p.h, sol.grid->point(j), slice, 0.0);
        xm[j] = slice.mean();
        xs[j] = stddev(slice.particles(), slice.mean());
        sol.x_slices.push_back(std::move(slice));
    }
    sol.k = GridPath(sol.grid, std::move(k));
    sol.eh = GridPath(sol.grid, std::move(eh));
    sol.x_mean = GridPath(sol.grid, std::move(xm));
    sol.x_std = GridPath(sol.grid, std::move(xs));
    return sol;
}

}  // namespace

void MeanProblem::validate() const {
    law.validate();
    barriers.validate();
    if (!(tol > 0.0)) throw InvalidArgumentError("root tolerance must be positive");
    const double eh0 = slice_constraint_mean(h, 0.0, law.slices[0], 0.0);
    const double l0 = barriers.lower ? barriers.lower->value(0) : -kInf;
    const double u0 = barriers.upper ? barriers.upper->value(0) : kInf;
    if (eh0 < l0 - 2.0 * tol || eh0 > u0 + 2.0 * tol)
        throw ConstraintViolationError(
            "mean constraint violated at t=0: mean h(0,Y0)=" + std::to_string(eh0) +
                " outside [" + std::to_string(l0) + ", " + std::to_string(u0) + "]",
            0.0);
}

namespace {

// Boundary-touching starts are legal, but the root-tolerance error of the
// barrier transform can leave y_0 a hair outside [lbar_0, ubar_0]. Pin the
// transformed band at t = 0 (a shift below the root tolerance) so that both
// deterministic routes start from k_0 = 0.
void pin_admissible_start(BarrierPair& transformed, double y0) {
    if (transformed.lower && transformed.lower->values()[0] > y0)
        transformed.lower->values()[0] = y0;
    if (transformed.upper && transformed.upper->values()[0] < y0)
        transformed.upper->values()[0] = y0;
}

}  // namespace

MeanSolution solve_mean_two_barrier(const MeanProblem& p) {
    p.validate();
    BarrierPair transformed = transform_barriers(p.h, p.barriers, p.law, p.tol);
    const GridPath y = p.law.mean_path();
    pin_admissible_start(transformed, y.value(0));
    const SkorokhodSolution recursive = solve_two_barrier(y, transformed);
    const SkorokhodSolution explicit_sol = solve_two_barrier_explicit(y, transformed);
    double max_diff = 0.0;
    for (std::size_t j = 0; j < y.size(); ++j)
        max_diff = std::max(max_diff, std::fabs(explicit_sol.k.value(j) - recursive.k.value(j)));
    if (max_diff > 1e-10)
        throw NumericalFailureError("explicit and recursive reflection solvers disagree",
                                    max_diff);
    return build_solution(p, transformed, recursive.k.values());
}

MeanSolution solve_mean_lower(const MeanProblem& p) {
    if (!p.barriers.lower || p.barriers.upper)
        throw InvalidArgumentError("solve_mean_lower needs exactly a lower barrier");
    p.validate();
    BarrierPair transformed = transform_barriers(p.h, p.barriers, p.law, p.tol);
    const GridPath y = p.law.mean_path();
    pin_admissible_start(transformed, y.value(0));
    std::vector<double> k(y.size());
    double running = 0.0;
    for (std::size_t j = 0; j < k.size(); ++j) {
        running = std::max(running, transformed.lower->value(j) - y.value(j));
        k[j] = running;
    }
    return build_solution(p, transformed, std::move(k));
}

MeanSolution solve_mean_upper(const MeanProblem& p) {
    if (!p.barriers.upper || p.barriers.lower)
        throw InvalidArgumentError("solve_mean_upper needs exactly an upper barrier");
    p.validate();
    BarrierPair transformed = transform_barriers(p.h, p.barriers, p.law, p.tol);
    const GridPath y = p.law.mean_path();
    pin_admissible_start(transformed, y.value(0));
    std::vector<double> k(y.size());
    double running = 0.0;
    for (std::size_t j = 0; j < k.size(); ++j) {
        running = std::min(running, transformed.upper->value(j) - y.value(j));
        k[j] = running;
    }
    return build_solution(p, transformed, std::move(k));
}

MinimalityReport verify_minimality(const MeanSolution& sol) {
    MinimalityReport rep;
    const std::size_t n = sol.grid->size();
    const double slack = 2.0 * sol.tol;
    const auto& k = sol.k.values();
    const auto& eh = sol.eh.values();
    double sup_k = 0.0;
    for (double v : k) sup_k = std::max(sup_k, std::fabs(v));
    const double dk_eps = 1e-14 * std::max(1.0, sup_k);

    auto lower_at = [&](std::size_t j) {
        return sol.barriers.lower ? sol.barriers.lower->value(j) : -kInf;
    };
    auto upper_at = [&](std::size_t j) {
        return sol.barriers.upper ? sol.barriers.upper->value(j) : kInf;
    };

    // (a) increment signs over maximal strict-inside runs.
    auto scan_runs = [&](bool below_upper) {
        std::size_t j = 1;
        while (j < n) {
            auto strict = [&](std::size_t i) {
                return below_upper ? eh[i] < upper_at(i) - slack : eh[i] > lower_at(i) + slack;
            };
            if (!strict(j)) {
                ++j;
                continue;
            }
            MinimalityReport::IntervalSign run;
            run.begin = j - 1;
            run.below_upper = below_upper;
            run.ok = true;
            while (j < n && strict(j)) {
                const double dk = k[j] - k[j - 1];
                if (below_upper ? dk < -dk_eps : dk > dk_eps) run.ok = false;
                run.end = j;
                ++j;
            }
            if (!run.ok) rep.all_ok = false;
            rep.sign_checks.push_back(run);
        }
    };
    scan_runs(true);
    scan_runs(false);

    // (b) Stieltjes sums over maximal intervals with a positive band gap.
    rep.integral_eps = 2.0 * sol.tol * total_variation(sol.k, sol.grid->horizon());
    {
        std::size_t j = 0;
        while (j < n) {
            if (!(upper_at(j) - lower_at(j) > 0.0)) {
                ++j;
                continue;
            }
            MinimalityReport::IntegralCheck chk;
            chk.begin = j;
            while (j < n && upper_at(j) - lower_at(j) > 0.0) {
                const double dk = (j == 0) ? 0.0 : k[j] - k[j - 1];
                if (sol.barriers.lower) chk.lower_integral += (eh[j] - lower_at(j)) * dk;
                if (sol.barriers.upper) chk.upper_integral += (eh[j] - upper_at(j)) * dk;
                chk.end = j;
                ++j;
            }
            chk.ok = chk.lower_integral <= rep.integral_eps &&
                     chk.upper_integral <= rep.integral_eps;
            if (!chk.ok) rep.all_ok = false;
            rep.integral_checks.push_back(chk);
        }
    }

    // (c) complementarity at jumps of k.
    for (std::size_t j = 1; j < n; ++j) {
        const double dk = k[j] - k[j - 1];
        if (dk > dk_eps) {
            const double gap = std::fabs(eh[j] - lower_at(j));
            if (!sol.barriers.lower || gap > slack) {
                rep.jump_violations.push_back({j, dk, gap});
                rep.all_ok = false;
            }
        } else if (dk < -dk_eps) {
            const double gap = std::fabs(eh[j] - upper_at(j));
            if (!sol.barriers.upper || gap > slack) {
                rep.jump_violations.push_back({j, dk, gap});
                rep.all_ok = false;
            }
        }
    }
    return rep;
}

MeanStabilityReport stability_report(const MeanProblem& p1, const MeanProblem& p2, double q) {
    if (!p1.law.grid->same_points(*p2.law.grid))
        throw InvalidArgumentError("stability report needs a common grid");
    if (!p1.law.slices.empty() && !p2.law.slices.empty() &&
        p1.law.slices[0].size() != p2.law.slices[0].size())
        throw InvalidArgumentError("stability report needs paired particles");
    const MeanSolution s1 = solve_mean_two_barrier(p1);
    const MeanSolution s2 = solve_mean_two_barrier(p2);
    const std::size_t last = p1.law.grid->index_at(std::min(q, p1.law.grid->horizon()));
    const std::size_t npart = p1.law.slices[0].size();

    MeanStabilityReport rep;
    for (std::size_t j = 0; j <= last; ++j)
        rep.lhs_k = std::max(rep.lhs_k, std::fabs(s1.k.value(j) - s2.k.value(j)));

    // Paired particle statistics.
    std::vector<double> sup_x(npart, 0.0), sup_y(npart, 0.0), abs_buf(npart);
    for (std::size_t j = 0; j <= last; ++j) {
        const auto& a = p1.law.slices[j].particles();
        const auto& b = p2.law.slices[j].particles();
        for (std::size_t i = 0; i < npart; ++i) {
            const double dy = std::fabs(a[i] - b[i]);
            sup_y[i] = std::max(sup_y[i], dy);
            abs_buf[i] = dy;
            const double dx = std::fabs((a[i] + s1.k.value(j)) - (b[i] + s2.k.value(j)));
            sup_x[i] = std::max(sup_x[i], dx);
        }
        rep.y_mean_distance = std::max(rep.y_mean_distance, mean(abs_buf));
    }
    rep.lhs_x = mean(sup_x);
    rep.y_sup_distance = mean(sup_y);

    auto barrier_sup = [&](const Barrier& a, const Barrier& b) {
        if (a.has_value() != b.has_value())
            throw InvalidArgumentError("stability report needs matching barrier patterns");
        if (!a) return 0.0;
        const GridPath ar = a->resample(p1.law.grid), br = b->resample(p1.law.grid);
        double m = 0.0;
        for (std::size_t j = 0; j <= last; ++j)
            m = std::max(m, std::fabs(ar.value(j) - br.value(j)));
        return m;
    };
    rep.barrier_distance = std::max(barrier_sup(p1.barriers.lower, p2.barriers.lower),
                                    barrier_sup(p1.barriers.upper, p2.barriers.upper));

    const SupDistance hd = sup_distance(p1.h, p2.h, std::min(q, p1.law.grid->horizon()));
    rep.h_distance = hd.value;
    rep.h_distance_exact = hd.exact;

    rep.constant = ConstraintFunction::stability_constant(p1.h, p2.h);
    rep.constant_literal = std::max(1.0 / p1.h.lower_slope,
                                    2.0 * p2.h.lower_slope / p1.h.lower_slope + 1.0);
    rep.rhs_k = rep.constant * (rep.h_distance + rep.y_mean_distance + rep.barrier_distance);
    rep.rhs_x = (rep.constant + 1.0) * rep.y_sup_distance +
                rep.constant * (rep.h_distance + rep.barrier_distance);
    const double slack = 1e-12 * std::max(1.0, std::max(rep.rhs_k, rep.rhs_x)) + 4.0 * p1.tol;
    rep.k_bound_holds = rep.lhs_k <= rep.rhs_k + slack;
    rep.x_bound_holds = rep.lhs_x <= rep.rhs_x + slack;
    return rep;
}

ModulusReport modulus_report(const MeanProblem& p, double t, double q) {
    if (t > q) throw InvalidArgumentError("modulus report needs t <= q");
    const MeanSolution sol = solve_mean_two_barrier(p);
    const std::size_t it = p.law.grid->index_at(t);
    const std::size_t iq = p.law.grid->index_at(std::min(q, p.law.grid->horizon()));
    const double span = p.law.grid->point(iq) - p.law.grid->point(it);
    const std::size_t npart = p.law.slices[0].size();

    ModulusReport rep;
    std::vector<double> sup_x(npart, 0.0), sup_y(npart, 0.0), abs_buf(npart);
    double y_mean_mod = 0.0, barrier_mod = 0.0;
    for (std::size_t j = it; j <= iq; ++j) {
        rep.lhs_k = std::max(rep.lhs_k, std::fabs(sol.k.value(j) - sol.k.value(it)));
        const auto& now = p.law.slices[j].particles();
        const auto& ref = p.law.slices[it].particles();
        for (std::size_t i = 0; i < npart; ++i) {
            const double dy = std::fabs(now[i] - ref[i]);
            sup_y[i] = std::max(sup_y[i], dy);
            abs_buf[i] = dy;
            sup_x[i] = std::max(sup_x[i], std::fabs(now[i] + sol.k.value(j) -
                                                    (ref[i] + sol.k.value(it))));
        }
        y_mean_mod = std::max(y_mean_mod, mean(abs_buf));
        if (sol.barriers.lower)
            barrier_mod = std::max(barrier_mod, std::fabs(sol.barriers.lower->value(j) -
                                                          sol.barriers.lower->value(it)));
        if (sol.barriers.upper)
            barrier_mod = std::max(barrier_mod, std::fabs(sol.barriers.upper->value(j) -
                                                          sol.barriers.upper->value(it)));
    }
    rep.lhs_x = mean(sup_x);
    const double c = ConstraintFunction::stability_constant(p.h, p.h);
    rep.rhs_k = c * (y_mean_mod + p.h.time_lipschitz * span + barrier_mod);
    rep.rhs_x = (c + 1.0) * mean(sup_y) + c * (p.h.time_lipschitz * span + barrier_mod);
    const double slack = 1e-12 * std::max(1.0, std::max(rep.rhs_k, rep.rhs_x)) + 4.0 * p.tol;
    rep.k_bound_holds = rep.lhs_k <= rep.rhs_k + slack;
    rep.x_bound_holds = rep.lhs_x <= rep.rhs_x + slack;
    return rep;
}

double mean_variation_bound(const MeanSolution& sol, double eta, double q) {
    if (!sol.transformed.lower || !sol.transformed.upper)
        throw InvalidArgumentError("variation bound needs both barriers");
    return variation_bound(sol.y, *sol.transformed.lower, *sol.transformed.upper, eta, q);
}

MeanSolution solve_discretized(const MeanProblem& p) {
    p.validate();
    const GridPath y = p.law.mean_path();
    const std::size_t n = p.law.grid->size();
    const GridPath l =
        p.barriers.lower ? p.barriers.lower->resample(p.law.grid) : GridPath();
    const GridPath u =
        p.barriers.upper ? p.barriers.upper->resample(p.law.grid) : GridPath();

    std::vector<double> lbar(n, -kInf), ubar(n, kInf), k(n);
    k[0] = 0.0;
    auto transform_at = [&](std::size_t j) {
        const double t = p.law.grid->point(j);
        if (p.barriers.lower)
            lbar[j] = mean_level_inverse(p.h, t, l.value(j), p.law.slices[j], p.tol);
        if (p.barriers.upper)
            ubar[j] = mean_level_inverse(p.h, t, u.value(j), p.law.slices[j], p.tol);
        if (p.barriers.lower && p.barriers.upper && ubar[j] < lbar[j]) ubar[j] = lbar[j];
    };
    transform_at(0);
    for (std::size_t j = 1; j < n; ++j) {
        transform_at(j);
        double kj = k[j - 1];
        if (p.barriers.upper) kj = std::min(kj, ubar[j] - y.value(j));
        if (p.barriers.lower) kj = std::max(kj, lbar[j] - y.value(j));
        k[j] = kj;
    }

    const MeanSolution via_solver = solve_mean_two_barrier(p);
    double max_diff = 0.0;
    for (std::size_t j = 0; j < n; ++j)
        max_diff = std::max(max_diff, std::fabs(k[j] - via_solver.k.value(j)));
    if (max_diff > 1e-10)
        throw NumericalFailureError("stepwise recursion disagrees with the direct solve",
                                    max_diff);

    BarrierPair transformed;
    if (p.barriers.lower) transformed.lower = GridPath(p.law.grid, std::move(lbar));
    if (p.barriers.upper) transformed.upper = GridPath(p.law.grid, std::move(ubar));
    return build_solution(p, transformed, std::move(k));
}

}  // namespace meanreflect
