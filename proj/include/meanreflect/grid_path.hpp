#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

namespace meanreflect {

// Finite time grid: strictly increasing points starting at 0. Shared between
// the paths of one problem instance.
class TimeGrid {
public:
    explicit TimeGrid(std::vector<double> points);

    // Uniform grid {k/n : k/n <= q} (the last point is the largest multiple
    // of 1/n not exceeding q).
    static std::shared_ptr<const TimeGrid> uniform(long n, double q);

    const std::vector<double>& points() const { return points_; }
    std::size_t size() const { return points_.size(); }
    double point(std::size_t i) const { return points_[i]; }
    double horizon() const { return points_.back(); }

    // Largest index i with points[i] <= t. Requires t >= 0.
    std::size_t index_at(double t) const;

    // Union of the two point sets (exact merge, no tolerance).
    std::shared_ptr<const TimeGrid> union_with(const TimeGrid& other) const;

    bool same_points(const TimeGrid& other) const { return points_ == other.points_; }

private:
    std::vector<double> points_;
};

using TimeGridPtr = std::shared_ptr<const TimeGrid>;

// Cadlag step path sampled on a grid: value at t is the value at the largest
// grid point <= t.
class GridPath {
public:
    GridPath() = default;
    GridPath(TimeGridPtr grid, std::vector<double> values);

    static GridPath constant(TimeGridPtr grid, double value);

    const TimeGridPtr& grid() const { return grid_; }
    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }
    std::size_t size() const { return values_.size(); }
    double value(std::size_t i) const { return values_[i]; }
    double operator()(double t) const { return values_[grid_->index_at(t)]; }

    // Same step function re-sampled on another grid (exact for refinements).
    GridPath resample(TimeGridPtr target) const;

private:
    TimeGridPtr grid_;
    std::vector<double> values_;
};

// One barrier; std::nullopt means the side is absent (no large-number
// stand-ins anywhere in the solvers).
using Barrier = std::optional<GridPath>;

struct BarrierPair {
    Barrier lower;
    Barrier upper;

    static BarrierPair two_sided(GridPath l, GridPath u);
    static BarrierPair lower_only(GridPath l);
    static BarrierPair upper_only(GridPath u);
    static BarrierPair unbounded() { return {}; }

    // Throws if both sides are present and l > u somewhere.
    void validate() const;
};

// Serializable piecewise path: contiguous segments that are either constant
// ("value") or linear with the given slope starting from the running value,
// plus explicit jumps resetting the running value at a time point.
struct PathSegment {
    double from = 0.0;
    double to = 0.0;
    std::optional<double> value;
    std::optional<double> slope;
};

struct PathJump {
    double at = 0.0;
    double to_value = 0.0;
};

struct PiecewiseSpec {
    std::vector<PathSegment> segments;
    std::vector<PathJump> jumps;

    static PiecewiseSpec constant(double value);
    static PiecewiseSpec linear(double start, double slope);

    double eval(double t) const;
    GridPath sample(TimeGridPtr grid) const;
    void validate() const;
};

// Step path t -> source(rho_n(t)) on the uniform grid {k/n : k/n <= q},
// rho_n(t) = floor(n t) / n.
GridPath discretize(const GridPath& source, long n, double q);
GridPath discretize(const std::function<double(double)>& source, long n, double q);
GridPath discretize(const PiecewiseSpec& source, long n, double q);

// Total variation of the step path on [0, q]: sum of |increments| over grid
// points <= q.
double total_variation(const GridPath& path, double q);

// Number of eta-oscillations on [0, q]: the largest count of successive time
// pairs t_1 <= ... <= t_{2k} <= q with |x_{t_{2i-1}} - x_{t_{2i}}| > eta.
// Greedy sweep (running min/max, reset at the point completing an
// oscillation), which attains the maximum for step paths.
long count_oscillations(const GridPath& path, double eta, double q);

}  // namespace meanreflect
