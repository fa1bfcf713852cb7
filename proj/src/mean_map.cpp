#include "meanreflect/mean_map.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "meanreflect/errors.hpp"
#include "meanreflect/parallel.hpp"

namespace meanreflect {

double ConstraintFunction::stability_constant(const ConstraintFunction& h1,
                                              const ConstraintFunction& h2) {
    return std::max(1.0 / h1.lower_slope, 2.0 * h2.upper_slope / h1.lower_slope + 1.0);
}

ConstraintFunction make_identity() {
    ConstraintFunction h;
    h.eval = [](double, double x) { return x; };
    h.time_lipschitz = 0.0;
    h.lower_slope = 1.0;
    h.upper_slope = 1.0;
    h.growth = 1.0;
    h.name = "identity";
    h.family = "identity";
    return h;
}

ConstraintFunction make_affine(double a, double b) {
    if (!(a > 0.0)) throw InvalidArgumentError("affine constraint function needs a > 0");
    ConstraintFunction h;
    h.eval = [a, b](double, double x) { return a * x + b; };
    h.time_lipschitz = 0.0;
    h.lower_slope = a;
    h.upper_slope = a;
    h.growth = std::max(a, std::fabs(b)) + 1e-12;
    h.name = "affine(" + std::to_string(a) + "," + std::to_string(b) + ")";
    h.family = "affine";
    h.params = {a, b};
    return h;
}

ConstraintFunction make_soft(double beta) {
    if (beta < 0.0 || beta >= 1.0) throw InvalidArgumentError("soft beta must be in [0, 1)");
    ConstraintFunction h;
    h.eval = [beta](double, double x) { return x + beta * std::tanh(x); };
    h.time_lipschitz = 0.0;
    h.lower_slope = 1.0;        // slope = 1 + beta sech^2(x) in [1, 1+beta]
    h.upper_slope = 1.0 + beta;
    h.growth = 1.0 + beta;
    h.name = "soft(" + std::to_string(beta) + ")";
    h.family = "soft";
    h.params = {beta};
    return h;
}

ConstraintFunction make_concave(double beta) {
    if (beta < 0.0 || beta >= 1.0) throw InvalidArgumentError("concave beta must be in [0, 1)");
    ConstraintFunction h;
    // x - beta ln((1+e^x)/2): slope 1 - beta/(1+e^{-x}) in [1-beta, 1],
    // decreasing in x, so the function is concave; h(t, 0) = 0.
    h.eval = [beta](double, double x) {
        const double softplus = x > 30.0 ? x : std::log1p(std::exp(std::min(x, 30.0)));
        return x - beta * (softplus - std::log(2.0));
    };
    h.time_lipschitz = 0.0;
    h.lower_slope = 1.0 - beta;
    h.upper_slope = 1.0;
    h.growth = 1.0 + beta;
    h.name = "concave(" + std::to_string(beta) + ")";
    h.family = "concave";
    h.params = {beta};
    return h;
}

ConstraintFunction make_time_tilt(double gamma, double t_max) {
    if (gamma < 0.0) throw InvalidArgumentError("time_tilt gamma must be >= 0");
    if (!(t_max > 0.0)) throw InvalidArgumentError("time_tilt t_max must be positive");
    ConstraintFunction h;
    h.eval = [gamma](double t, double x) { return x + gamma * t * std::atan(x); };
    const double half_pi = std::acos(-1.0) / 2.0;
    h.time_lipschitz = gamma * half_pi;
    h.lower_slope = 1.0;  // slope = 1 + gamma t / (1+x^2) in [1, 1 + gamma t]
    h.upper_slope = 1.0 + gamma * t_max;
    h.growth = 1.0 + gamma * t_max * half_pi;
    h.name = "time_tilt(" + std::to_string(gamma) + ")";
    h.family = "time_tilt";
    h.params = {gamma, t_max};
    return h;
}

void audit_constants(const ConstraintFunction& h, double t_max) {
    if (!(h.lower_slope > 0.0)) throw InvalidArgumentError(h.name + ": lower slope must be > 0");
    if (h.upper_slope < h.lower_slope)
        throw InvalidArgumentError(h.name + ": upper slope below lower slope");
    const int nx = 501, nt = 21;
    const double x_lo = -12.0, x_hi = 12.0;
    const double slope_lo = h.lower_slope * (1.0 - 1e-6);
    const double slope_hi = h.upper_slope * (1.0 + 1e-6);
    for (int it = 0; it < nt; ++it) {
        const double t = t_max * it / (nt - 1);
        double prev = h(t, x_lo);
        for (int ix = 1; ix < nx; ++ix) {
            const double x0 = x_lo + (x_hi - x_lo) * (ix - 1) / (nx - 1);
            const double x1 = x_lo + (x_hi - x_lo) * ix / (nx - 1);
            const double v = h(t, x1);
            if (!(v > prev)) throw InvalidArgumentError(h.name + ": not strictly increasing");
            const double slope = (v - prev) / (x1 - x0);
            if (slope < slope_lo || slope > slope_hi)
                throw InvalidArgumentError(h.name + ": slope " + std::to_string(slope) +
                                           " outside declared range at x=" + std::to_string(x1));
            if (std::fabs(v) > h.growth * (1.0 + std::fabs(x1)) * (1.0 + 1e-9))
                throw InvalidArgumentError(h.name + ": growth constant violated");
            prev = v;
        }
    }
    // Time Lipschitz constant on pairs of lattice times.
    for (int it = 1; it < nt; ++it) {
        const double t0 = t_max * (it - 1) / (nt - 1);
        const double t1 = t_max * it / (nt - 1);
        for (int ix = 0; ix < 41; ++ix) {
            const double x = x_lo + (x_hi - x_lo) * ix / 40.0;
            const double dv = std::fabs(h(t1, x) - h(t0, x));
            if (dv > h.time_lipschitz * (t1 - t0) * (1.0 + 1e-9) + 1e-14)
                throw InvalidArgumentError(h.name + ": time Lipschitz constant violated");
        }
    }
}

SupDistance sup_distance(const ConstraintFunction& h1, const ConstraintFunction& h2, double q) {
    auto exact = [](double v) { return SupDistance{v, true}; };
    const double half_pi = std::acos(-1.0) / 2.0;
    if (h1.family == h2.family) {
        if (h1.family == "identity") return exact(0.0);
        if (h1.family == "soft") return exact(std::fabs(h1.params[0] - h2.params[0]));
        if (h1.family == "time_tilt")
            return exact(std::fabs(h1.params[0] - h2.params[0]) * q * half_pi);
        if (h1.family == "affine") {
            if (h1.params[0] == h2.params[0])
                return exact(std::fabs(h1.params[1] - h2.params[1]));
            return exact(std::numeric_limits<double>::infinity());
        }
        if (h1.family == "concave" && h1.params[0] == h2.params[0]) return exact(0.0);
    }
    const ConstraintFunction* a = &h1;
    const ConstraintFunction* b = &h2;
    if (b->family == "identity") std::swap(a, b);
    if (a->family == "identity") {
        if (b->family == "soft") return exact(b->params[0]);
        if (b->family == "time_tilt") return exact(b->params[0] * q * half_pi);
        if (b->family == "affine") {
            if (b->params[0] == 1.0) return exact(std::fabs(b->params[1]));
            return exact(std::numeric_limits<double>::infinity());
        }
        if (b->family == "concave") return exact(std::numeric_limits<double>::infinity());
    }
    // Lattice estimate (reported as such).
    SupDistance est;
    const int nt = 200, nx = 2001;
    for (int it = 0; it < nt; ++it) {
        const double t = q * it / (nt - 1);
        for (int ix = 0; ix < nx; ++ix) {
            const double x = -10.0 + 20.0 * ix / (nx - 1);
            est.value = std::max(est.value, std::fabs(h1(t, x) - h2(t, x)));
        }
    }
    est.exact = false;
    return est;
}

Ensemble::Ensemble(std::vector<double> particles) : particles_(std::move(particles)) {
    if (particles_.empty()) throw InvalidArgumentError("ensemble needs at least one particle");
    mean_ = meanreflect::mean(particles_);
}

void EnsemblePath::validate() const {
    if (!grid) throw InvalidArgumentError("ensemble path needs a grid");
    if (slices.size() != grid->size())
        throw InvalidArgumentError("ensemble path needs one ensemble per grid point");
    for (const auto& s : slices) {
        if (s.size() != slices.front().size())
            throw InvalidArgumentError("ensemble path slices must share the particle count");
    }
}

GridPath EnsemblePath::mean_path() const {
    std::vector<double> m(slices.size());
    for (std::size_t i = 0; i < slices.size(); ++i) m[i] = slices[i].mean();
    return GridPath(grid, std::move(m));
}

double mean_level(const ConstraintFunction& h, double t, double z, const Ensemble& ens) {
    const std::size_t n = ens.size();
    const double centre = z - ens.mean();
    const auto& ys = ens.particles();
    std::vector<double> buf(n);
    parallel_for(n, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) buf[i] = h(t, ys[i] + centre);
    });
    return mean(buf);
}

double mean_level_inverse(const ConstraintFunction& h, double t, double target,
                          const Ensemble& ens, double tol) {
    if (!(tol > 0.0)) throw InvalidArgumentError("inverse tolerance must be positive");
    const double z0 = target;
    double f0 = mean_level(h, t, z0, ens) - target;
    if (std::fabs(f0) <= tol) return z0;
    double radius = std::fabs(f0) / h.lower_slope;
    double lo = z0 - radius, hi = z0 + radius;
    double flo = mean_level(h, t, lo, ens) - target;
    double fhi = mean_level(h, t, hi, ens) - target;
    int expansions = 0;
    while (flo > 0.0 || fhi < 0.0) {
        // The bracket is valid by the two-sided slope bound; expand only if
        // rounding spoiled it.
        radius *= 2.0;
        lo = z0 - radius;
        hi = z0 + radius;
        flo = mean_level(h, t, lo, ens) - target;
        fhi = mean_level(h, t, hi, ens) - target;
        if (++expansions > 120)
            throw NumericalFailureError("could not bracket the mean-level inverse",
                                        std::fabs(f0));
    }
    double mid = z0, fmid = f0;
    for (int iter = 0; iter < 200; ++iter) {
        mid = 0.5 * (lo + hi);
        fmid = mean_level(h, t, mid, ens) - target;
        if (std::fabs(fmid) <= tol) return mid;
        if (fmid < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    throw NumericalFailureError("mean-level inverse bisection exceeded 200 iterations",
                                std::fabs(fmid));
}

BarrierPair transform_barriers(const ConstraintFunction& h, const BarrierPair& barriers,
                               const EnsemblePath& law, double tol) {
    law.validate();
    BarrierPair out;
    const auto transform = [&](const GridPath& side) {
        const GridPath aligned = side.resample(law.grid);
        std::vector<double> vals(law.grid->size());
        for (std::size_t i = 0; i < vals.size(); ++i)
            vals[i] = mean_level_inverse(h, law.grid->point(i), aligned.value(i),
                                         law.slices[i], tol);
        return GridPath(law.grid, std::move(vals));
    };
    if (barriers.lower) out.lower = transform(*barriers.lower);
    if (barriers.upper) out.upper = transform(*barriers.upper);
    if (out.lower && out.upper) {
        // Monotonicity of the inverse guarantees lbar <= ubar up to root
        // tolerance; pin the order exactly.
        for (std::size_t i = 0; i < out.lower->size(); ++i) {
            if (out.upper->values()[i] < out.lower->values()[i])
                out.upper->values()[i] = out.lower->values()[i];
        }
    }
    return out;
}

}  // namespace meanreflect
