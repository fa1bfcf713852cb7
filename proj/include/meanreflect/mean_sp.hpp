#pragma once

#include <optional>
#include <vector>

#include "meanreflect/grid_path.hpp"
#include "meanreflect/mean_map.hpp"
#include "meanreflect/skorokhod.hpp"

namespace meanreflect {

// Reflection problem for the law of Y: find a deterministic k with
// mean of h(t, Y_t + k_t) confined to [l_t, u_t].
struct MeanProblem {
    EnsemblePath law;        // Y ensembles along the grid
    ConstraintFunction h;
    BarrierPair barriers;
    double tol = 1e-10;      // root tolerance for the barrier transform

    void validate() const;   // shape checks + admissibility at t = 0
};

struct MeanSolution {
    TimeGridPtr grid;
    GridPath y;              // ensemble mean of Y
    GridPath k;              // deterministic compensating path, k_0 = 0
    BarrierPair barriers;    // original barriers sampled on the grid
    BarrierPair transformed; // lbar / ubar
    GridPath eh;             // mean of h(t, X_t)
    GridPath x_mean;
    GridPath x_std;
    std::vector<Ensemble> x_slices;  // X particles per grid time (Y + k)
    double tol = 1e-10;
};

// Solves by the constructive route: transform the barriers through the
// monotone inverse on the Y-law, solve the deterministic problem for the
// mean path, then shift every particle by k. The clamp recursion is the
// production path; the explicit representation cross-checks it.
MeanSolution solve_mean_two_barrier(const MeanProblem& p);

// One-barrier forms: k_t = sup_{s<=t}(lbar_s - mean Y_s)^+ (nondecreasing),
// and mirrored for an upper barrier.
MeanSolution solve_mean_lower(const MeanProblem& p);
MeanSolution solve_mean_upper(const MeanProblem& p);

// Diagnostic verification of the minimality structure of a solution:
//  (a) sign of k-increments per maximal interval strictly inside a barrier,
//  (b) Stieltjes sums of (eh - l) dk and (eh - u) dk over maximal intervals
//      with a positive band gap,
//  (c) complementarity at jumps of k.
// Failures are reported, never thrown.
struct MinimalityReport {
    struct IntervalSign {
        std::size_t begin = 0, end = 0;  // grid index range
        bool below_upper = false;        // which one-sided condition applies
        bool ok = true;
    };
    struct IntegralCheck {
        std::size_t begin = 0, end = 0;
        double lower_integral = 0.0;  // sum (eh - l) dk  (required <= eps)
        double upper_integral = 0.0;  // sum (eh - u) dk  (required <= eps)
        bool ok = true;
    };
    struct JumpViolation {
        std::size_t index = 0;
        double dk = 0.0;
        double gap = 0.0;  // |eh - active barrier|
    };
    std::vector<IntervalSign> sign_checks;
    std::vector<IntegralCheck> integral_checks;
    std::vector<JumpViolation> jump_violations;
    double integral_eps = 0.0;
    bool all_ok = true;
};

MinimalityReport verify_minimality(const MeanSolution& sol);

// Lipschitz stability of the solution map across two problems sharing a grid
// and paired particles (common randomness). Evaluates both sides of the k-
// and X-estimates with the stability constant in its conservative
// (upper-slope) reading; the literal lower-slope reading is reported too.
struct MeanStabilityReport {
    double lhs_k = 0.0;         // sup_t |k1 - k2|
    double lhs_x = 0.0;         // mean over particles of sup_t |X1 - X2|
    double h_distance = 0.0;    // sup norm of h1 - h2 on [0,q] x R
    bool h_distance_exact = false;
    double y_mean_distance = 0.0;   // sup_t mean |Y1 - Y2|
    double barrier_distance = 0.0;  // sup_t max(|l1-l2|, |u1-u2|)
    double y_sup_distance = 0.0;    // mean over particles of sup_t |Y1 - Y2|
    double constant = 0.0;          // conservative stability constant
    double constant_literal = 0.0;  // lower-slope reading
    double rhs_k = 0.0;
    double rhs_x = 0.0;
    bool k_bound_holds = false;
    bool x_bound_holds = false;
};

MeanStabilityReport stability_report(const MeanProblem& p1, const MeanProblem& p2, double q);

// Modulus-of-variation check on [t, q] for a single problem: compares the
// oscillation of k (and of X) after t against the stability-constant bound
// built from the oscillation of Y, the time drift of h and the barriers.
struct ModulusReport {
    double lhs_k = 0.0;   // sup_{t<=s<=q} |k_s - k_t|
    double lhs_x = 0.0;   // mean over particles of sup_{t<=s<=q} |X_s - X_t|
    double rhs_k = 0.0;
    double rhs_x = 0.0;
    bool k_bound_holds = false;
    bool x_bound_holds = false;
};

ModulusReport modulus_report(const MeanProblem& p, double t, double q);

// Variation bound on k through eta-oscillations of the mean path and the
// transformed barriers; the band separation precondition is tested on the
// transformed band.
double mean_variation_bound(const MeanSolution& sol, double eta, double q);

// Runs the one-pass discretized recursion directly (transform the barrier
// values at each step on that step's ensemble, then clamp) and asserts that
// it reproduces solve_mean_two_barrier on the same inputs to 1e-10.
MeanSolution solve_discretized(const MeanProblem& p);

}  // namespace meanreflect
