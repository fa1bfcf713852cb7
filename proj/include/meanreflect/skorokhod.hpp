#pragma once

#include "meanreflect/grid_path.hpp"

namespace meanreflect {

// Solution of the deterministic two-barrier reflection problem: x = y + k
// stays inside [l, u] and k moves only against the active barrier.
struct SkorokhodSolution {
    GridPath x;
    GridPath k;
};

// Production solver: one-pass clamp recursion
//   k_0 = 0,  k_{j+1} = max(min(k_j, u_{j+1} - y_{j+1}), l_{j+1} - y_{j+1}),
// with the corresponding clamp branch dropped for an absent barrier.
// Inputs on different grids are refined to the union grid first.
SkorokhodSolution solve_two_barrier(const GridPath& y, const BarrierPair& barriers);

// Cross-validation solver: the explicit max/inf/sup representation of k,
// evaluated at all grid times in one forward pass over prefix quantities.
// Agrees with the recursion to well below 1e-10.
SkorokhodSolution solve_two_barrier_explicit(const GridPath& y, const BarrierPair& barriers);

// Second oracle: the same explicit representation evaluated at a single grid
// index by a backward scan maintaining inf over [s, t] of (y - l). O(n) per
// call, so quadratic when applied to every index; intended for n <= 500.
double explicit_k_at(const GridPath& y, const BarrierPair& barriers, std::size_t index);

// One-barrier specializations: k_t = sup_{s<=t}(l_s - y_s)^+ (nondecreasing)
// and k_t = -sup_{s<=t}(y_s - u_s)^+ (nonincreasing).
SkorokhodSolution solve_lower(const GridPath& y, const GridPath& l);
SkorokhodSolution solve_upper(const GridPath& y, const GridPath& u);

// A-priori bound on the total variation of k on [0, q] in terms of
// eta-oscillation counts; requires 0 < 2 eta <= inf(u - l)/3 on [0, q].
double variation_bound(const GridPath& y, const GridPath& l, const GridPath& u, double eta,
                       double q);

// Lipschitz stability of the solution map in sup norm: solves both problems
// and evaluates both sides of the k- and x-estimates.
struct StabilityReport {
    double lhs_k = 0.0;   // sup |k1 - k2|
    double lhs_x = 0.0;   // sup |x1 - x2|
    double rhs_k = 0.0;   // sup|y1-y2| + sup max(|l1-l2|, |u1-u2|)
    double rhs_x = 0.0;   // 2 sup|y1-y2| + sup max(|l1-l2|, |u1-u2|)
    bool k_bound_holds = false;
    bool x_bound_holds = false;
};

StabilityReport stability_bound_check(const GridPath& y1, const GridPath& y2,
                                      const BarrierPair& b1, const BarrierPair& b2, double q);

}  // namespace meanreflect
