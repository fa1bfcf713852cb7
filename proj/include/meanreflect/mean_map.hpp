#pragma once

#include <functional>
#include <string>
#include <vector>

#include "meanreflect/grid_path.hpp"

namespace meanreflect {

// Constraint function h(t, x) with its declared constants:
//   |h(t,x)| <= growth * (1 + |x|),
//   |h(t,x) - h(s,x)| <= time_lipschitz * |t-s|,
//   lower_slope * |x-y| <= |h(t,x) - h(t,y)| <= upper_slope * |x-y|,
// and x -> h(t,x) strictly increasing. Constants are declared, never
// inferred; audit_constants() spot-checks them on a lattice.
struct ConstraintFunction {
    std::function<double(double, double)> eval;
    double time_lipschitz = 0.0;  // Lambda_h
    double lower_slope = 1.0;     // c_h  (> 0)
    double upper_slope = 1.0;     // C_h upper bound (>= lower_slope)
    double growth = 1.0;          // M_h
    std::string name;             // registry id, e.g. "soft(0.5)"
    std::string family;           // registry family, e.g. "soft"
    std::vector<double> params;

    double operator()(double t, double x) const { return eval(t, x); }
    bool is_identity() const { return name == "identity"; }

    // Stability constant of the solution map for a pair (h1, h2), evaluated
    // with the conservative upper-slope reading; see stability reports.
    static double stability_constant(const ConstraintFunction& h1, const ConstraintFunction& h2);
};

// Shipped registry:
//   identity
//   affine(a, b)      h = a x + b, a > 0
//   soft(beta)        h = x + beta tanh(x), 0 <= beta < 1
//   concave(beta)     h = x - beta ln((1+e^x)/2), 0 <= beta < 1 (concave)
//   time_tilt(gamma)  h = x + gamma t arctan(x), constants valid on
//                     t in [0, t_max]
ConstraintFunction make_identity();
ConstraintFunction make_affine(double a, double b);
ConstraintFunction make_soft(double beta);
ConstraintFunction make_concave(double beta);
ConstraintFunction make_time_tilt(double gamma, double t_max = 10.0);

// Lattice audit of the declared constants; throws InvalidArgumentError when
// a declared constant is violated (monotonicity included). `t_max` bounds the
// time lattice.
void audit_constants(const ConstraintFunction& h, double t_max = 10.0);

// Exact sup over [0,q] x R of |h1 - h2| for registry pairs with a closed
// form; otherwise a lattice estimate over [0,q] x [-10, 10].
struct SupDistance {
    double value = 0.0;
    bool exact = false;
};
SupDistance sup_distance(const ConstraintFunction& h1, const ConstraintFunction& h2, double q);

// Particle ensemble: the empirical law of one time slice. The mean is fixed
// at construction with a fixed-shape pairwise reduction, so it does not
// depend on worker counts.
class Ensemble {
public:
    explicit Ensemble(std::vector<double> particles);

    const std::vector<double>& particles() const { return particles_; }
    std::size_t size() const { return particles_.size(); }
    double mean() const { return mean_; }

private:
    std::vector<double> particles_;
    double mean_ = 0.0;
};

// One ensemble per grid time.
struct EnsemblePath {
    TimeGridPtr grid;
    std::vector<Ensemble> slices;

    void validate() const;
    GridPath mean_path() const;
};

// mean of h(t, Y_i - mean(Y) + z): strictly increasing and continuous in z.
double mean_level(const ConstraintFunction& h, double t, double z, const Ensemble& ens);

// Monotone inverse of mean_level in z, by bracketed bisection: returns z*
// with |mean_level(h, t, z*, ens) - target| <= tol. The initial bracket is
// [z0 - r, z0 + r] with z0 = target and r = residual / lower_slope, expanded
// geometrically if rounding spoils it.
double mean_level_inverse(const ConstraintFunction& h, double t, double target,
                          const Ensemble& ens, double tol);

// Pointwise barrier transform: lbar_t = inverse at l_t, ubar_t at u_t, on the
// given law path. Absent barriers pass through; guarantees lbar <= ubar.
BarrierPair transform_barriers(const ConstraintFunction& h, const BarrierPair& barriers,
                               const EnsemblePath& law, double tol);

}  // namespace meanreflect
