#include "meanreflect/skorokhod.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "meanreflect/errors.hpp"

namespace meanreflect {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct AlignedProblem {
    TimeGridPtr grid;
    std::vector<double> y;
    std::vector<double> l;  // -inf entries when the lower barrier is absent
    std::vector<double> u;  // +inf entries when the upper barrier is absent
    bool has_lower = false;
    bool has_upper = false;
};

AlignedProblem align(const GridPath& y, const BarrierPair& barriers) {
    barriers.validate();
    TimeGridPtr grid = y.grid();
    if (barriers.lower) grid = grid->union_with(*barriers.lower->grid());
    if (barriers.upper) grid = grid->union_with(*barriers.upper->grid());
    AlignedProblem p;
    p.grid = grid;
    p.y = y.resample(grid).values();
    p.has_lower = barriers.lower.has_value();
    p.has_upper = barriers.upper.has_value();
    p.l = p.has_lower ? barriers.lower->resample(grid).values()
                      : std::vector<double>(grid->size(), -kInf);
    p.u = p.has_upper ? barriers.upper->resample(grid).values()
                      : std::vector<double>(grid->size(), kInf);
    return p;
}

void check_start(const AlignedProblem& p) {
    if (p.y[0] < p.l[0] || p.y[0] > p.u[0])
        throw ConstraintViolationError(
            "starting point outside the barriers at t=0 (y0=" + std::to_string(p.y[0]) + ")",
            0.0);
}

SkorokhodSolution package(const AlignedProblem& p, std::vector<double> k) {
    std::vector<double> x(p.y.size());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = p.y[i] + k[i];
    return {GridPath(p.grid, std::move(x)), GridPath(p.grid, std::move(k))};
}

inline double drop_negzero(double v) { return v == 0.0 ? 0.0 : v; }

}  // namespace

SkorokhodSolution solve_two_barrier(const GridPath& y, const BarrierPair& barriers) {
    const AlignedProblem p = align(y, barriers);
    check_start(p);
    std::vector<double> k(p.y.size());
    k[0] = 0.0;
    for (std::size_t j = 1; j < k.size(); ++j) {
        double kj = k[j - 1];
        if (p.has_upper) kj = std::min(kj, p.u[j] - p.y[j]);
        if (p.has_lower) kj = std::max(kj, p.l[j] - p.y[j]);
        k[j] = kj;
    }
    return package(p, std::move(k));
}

SkorokhodSolution solve_two_barrier_explicit(const GridPath& y, const BarrierPair& barriers) {
    const AlignedProblem p = align(y, barriers);
    check_start(p);
    // k_t = -max( 0 ^ inf_{u<=t}(y-l),  sup_{s<=t}[ (y_s-u_s) ^ inf_{s<=u<=t}(y-l) ] ).
    // The sup term updates in O(1) per step: appending d_{t} replaces every
    // inner inf I_s by min(I_s, d_t), and max_s min(m_s, d) = min(max_s m_s, d).
    std::vector<double> k(p.y.size());
    double prefix_inf = kInf;  // inf over [0, t] of (y - l)
    double sup_term = -kInf;   // sup over s <= t of min(y_s - u_s, inf_{[s,t]}(y - l))
    for (std::size_t t = 0; t < k.size(); ++t) {
        const double d = p.y[t] - p.l[t];  // +inf when no lower barrier
        const double c = p.y[t] - p.u[t];  // -inf when no upper barrier
        prefix_inf = std::min(prefix_inf, d);
        sup_term = std::max(std::min(sup_term, d), std::min(c, d));
        k[t] = drop_negzero(-std::max(std::min(0.0, prefix_inf), sup_term));
    }
    return package(p, std::move(k));
}

double explicit_k_at(const GridPath& y, const BarrierPair& barriers, std::size_t index) {
    const AlignedProblem p = align(y, barriers);
    if (index >= p.y.size()) throw InvalidArgumentError("explicit_k_at index beyond grid");
    double inner_inf = kInf;  // inf over [s, index] of (y - l), shrinking s
    double sup_term = -kInf;
    for (std::size_t s = index + 1; s-- > 0;) {
        inner_inf = std::min(inner_inf, p.y[s] - p.l[s]);
        sup_term = std::max(sup_term, std::min(p.y[s] - p.u[s], inner_inf));
    }
    return drop_negzero(-std::max(std::min(0.0, inner_inf), sup_term));
}

SkorokhodSolution solve_lower(const GridPath& y, const GridPath& l) {
    TimeGridPtr grid = y.grid()->union_with(*l.grid());
    const std::vector<double> yv = y.resample(grid).values();
    const std::vector<double> lv = l.resample(grid).values();
    if (yv[0] < lv[0])
        throw ConstraintViolationError("starting point below the lower barrier at t=0", 0.0);
    std::vector<double> k(yv.size());
    double running = 0.0;
    for (std::size_t j = 0; j < k.size(); ++j) {
        running = std::max(running, lv[j] - yv[j]);
        k[j] = running;
    }
    std::vector<double> x(yv.size());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = yv[i] + k[i];
    return {GridPath(grid, std::move(x)), GridPath(grid, std::move(k))};
}

SkorokhodSolution solve_upper(const GridPath& y, const GridPath& u) {
    TimeGridPtr grid = y.grid()->union_with(*u.grid());
    const std::vector<double> yv = y.resample(grid).values();
    const std::vector<double> uv = u.resample(grid).values();
    if (yv[0] > uv[0])
        throw ConstraintViolationError("starting point above the upper barrier at t=0", 0.0);
    std::vector<double> k(yv.size());
    double running = 0.0;
    for (std::size_t j = 0; j < k.size(); ++j) {
        running = std::min(running, uv[j] - yv[j]);
        k[j] = running;
    }
    std::vector<double> x(yv.size());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = yv[i] + k[i];
    return {GridPath(grid, std::move(x)), GridPath(grid, std::move(k))};
}

double variation_bound(const GridPath& y, const GridPath& l, const GridPath& u, double eta,
                       double q) {
    if (!(eta > 0.0)) throw InvalidArgumentError("eta must be positive");
    TimeGridPtr grid = y.grid()->union_with(*l.grid());
    grid = grid->union_with(*u.grid());
    const GridPath yr = y.resample(grid), lr = l.resample(grid), ur = u.resample(grid);
    const std::size_t last = grid->index_at(std::min(q, grid->horizon()));
    double band = kInf;
    for (std::size_t i = 0; i <= last; ++i) band = std::min(band, ur.value(i) - lr.value(i));
    if (!(2.0 * eta <= band / 3.0))
        throw InvalidArgumentError("band separation violated: minimal band width " +
                                   std::to_string(band) + " requires 2*eta <= " +
                                   std::to_string(band / 3.0));
    const long n_osc =
        count_oscillations(yr, eta, q) + count_oscillations(lr, eta, q) +
        count_oscillations(ur, eta, q);
    double sup_y = 0.0, sup_barrier = 0.0;
    for (std::size_t i = 0; i <= last; ++i) {
        sup_y = std::max(sup_y, std::fabs(yr.value(i)));
        sup_barrier =
            std::max(sup_barrier, std::max(std::fabs(lr.value(i)), std::fabs(ur.value(i))));
    }
    return 6.0 * static_cast<double>(n_osc + 1) * (sup_y + sup_barrier);
}

StabilityReport stability_bound_check(const GridPath& y1, const GridPath& y2,
                                      const BarrierPair& b1, const BarrierPair& b2, double q) {
    if (b1.lower.has_value() != b2.lower.has_value() ||
        b1.upper.has_value() != b2.upper.has_value())
        throw InvalidArgumentError("stability check needs matching barrier patterns");
    const SkorokhodSolution s1 = solve_two_barrier(y1, b1);
    const SkorokhodSolution s2 = solve_two_barrier(y2, b2);
    TimeGridPtr grid = s1.k.grid()->union_with(*s2.k.grid());
    const std::size_t last = grid->index_at(std::min(q, grid->horizon()));

    auto sup_diff = [&](const GridPath& a, const GridPath& b) {
        const GridPath ar = a.resample(grid), br = b.resample(grid);
        double m = 0.0;
        for (std::size_t i = 0; i <= last; ++i)
            m = std::max(m, std::fabs(ar.value(i) - br.value(i)));
        return m;
    };

    StabilityReport rep;
    rep.lhs_k = sup_diff(s1.k, s2.k);
    rep.lhs_x = sup_diff(s1.x, s2.x);
    const double dy = sup_diff(y1, y2);
    double db = 0.0;
    if (b1.lower) db = std::max(db, sup_diff(*b1.lower, *b2.lower));
    if (b1.upper) db = std::max(db, sup_diff(*b1.upper, *b2.upper));
    rep.rhs_k = dy + db;
    rep.rhs_x = 2.0 * dy + db;
    const double slack = 1e-12 * std::max(1.0, std::max(rep.rhs_k, rep.rhs_x));
    rep.k_bound_holds = rep.lhs_k <= rep.rhs_k + slack;
    rep.x_bound_holds = rep.lhs_x <= rep.rhs_x + slack;
    return rep;
}

}  // namespace meanreflect
