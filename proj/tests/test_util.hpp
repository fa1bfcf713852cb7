#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "meanreflect/grid_path.hpp"

namespace testutil {

using meanreflect::BarrierPair;
using meanreflect::GridPath;
using meanreflect::TimeGrid;
using meanreflect::TimeGridPtr;

inline TimeGridPtr random_grid(std::mt19937_64& rng, std::size_t max_points) {
    std::uniform_int_distribution<std::size_t> size_dist(2, max_points);
    const std::size_t n = size_dist(rng);
    std::exponential_distribution<double> gap(4.0);
    std::vector<double> pts{0.0};
    while (pts.size() < n) pts.push_back(pts.back() + gap(rng) + 1e-4);
    return std::make_shared<TimeGrid>(std::move(pts));
}

// Step path with both diffusive wiggle and occasional jumps.
inline GridPath random_path(std::mt19937_64& rng, TimeGridPtr grid, double start,
                            double scale) {
    std::normal_distribution<double> step(0.0, 0.25 * scale);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::uniform_real_distribution<double> jump(-scale, scale);
    std::vector<double> vals(grid->size());
    vals[0] = start;
    for (std::size_t i = 1; i < vals.size(); ++i) {
        vals[i] = vals[i - 1] + step(rng);
        if (u01(rng) < 0.08) vals[i] += jump(rng);
    }
    return GridPath(std::move(grid), std::move(vals));
}

struct RandomInstance {
    GridPath y;
    BarrierPair barriers;
};

// Well-posed two-barrier instance: random band with positive width and a
// driving path started inside the band at t = 0.
inline RandomInstance random_instance(std::mt19937_64& rng, std::size_t max_points,
                                      double min_width = 0.0) {
    TimeGridPtr grid = random_grid(rng, max_points);
    GridPath lower = random_path(rng, grid, -1.0, 0.8);
    std::uniform_real_distribution<double> width(min_width + 0.05, min_width + 2.0);
    std::vector<double> upper_vals(grid->size());
    GridPath gap = random_path(rng, grid, 0.0, 0.4);
    for (std::size_t i = 0; i < grid->size(); ++i)
        upper_vals[i] = lower.value(i) + std::max(min_width, std::fabs(gap.value(i))) +
                        (min_width > 0.0 ? min_width : 0.0) + width(rng) * 0.1;
    GridPath upper(grid, std::move(upper_vals));
    std::uniform_real_distribution<double> frac(0.0, 1.0);
    const double y0 =
        lower.value(0) + frac(rng) * (upper.value(0) - lower.value(0));
    GridPath y = random_path(rng, grid, y0, 1.2);
    return {std::move(y), BarrierPair::two_sided(std::move(lower), std::move(upper))};
}

}  // namespace testutil
