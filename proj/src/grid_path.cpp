#include "meanreflect/grid_path.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "meanreflect/errors.hpp"

namespace meanreflect {

TimeGrid::TimeGrid(std::vector<double> points) : points_(std::move(points)) {
    if (points_.size() < 2) throw InvalidArgumentError("time grid needs at least 2 points");
    if (points_.front() != 0.0) throw InvalidArgumentError("time grid must start at 0");
    for (std::size_t i = 1; i < points_.size(); ++i) {
        if (!(points_[i] > points_[i - 1]))
            throw InvalidArgumentError("time grid points must be strictly increasing");
    }
}

TimeGridPtr TimeGrid::uniform(long n, double q) {
    if (n < 1) throw InvalidArgumentError("grid resolution n must be >= 1");
    if (!(q > 0.0)) throw InvalidArgumentError("horizon q must be positive");
    const long steps = static_cast<long>(std::floor(q * static_cast<double>(n) + 1e-9));
    if (steps < 1) throw InvalidArgumentError("horizon shorter than one grid step");
    std::vector<double> pts;
    pts.reserve(static_cast<std::size_t>(steps) + 1);
    for (long k = 0; k <= steps; ++k)
        pts.push_back(static_cast<double>(k) / static_cast<double>(n));
    return std::make_shared<TimeGrid>(std::move(pts));
}

std::size_t TimeGrid::index_at(double t) const {
    if (t < 0.0) throw InvalidArgumentError("evaluation time must be >= 0");
    auto it = std::upper_bound(points_.begin(), points_.end(), t);
    return static_cast<std::size_t>(it - points_.begin()) - 1;
}

TimeGridPtr TimeGrid::union_with(const TimeGrid& other) const {
    std::vector<double> merged;
    merged.reserve(points_.size() + other.points_.size());
    std::merge(points_.begin(), points_.end(), other.points_.begin(), other.points_.end(),
               std::back_inserter(merged));
    merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
    return std::make_shared<TimeGrid>(std::move(merged));
}

GridPath::GridPath(TimeGridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (!grid_) throw InvalidArgumentError("grid path needs a grid");
    if (values_.size() != grid_->size())
        throw InvalidArgumentError("grid path needs one value per grid point");
}

GridPath GridPath::constant(TimeGridPtr grid, double value) {
    std::vector<double> vals(grid->size(), value);
    return GridPath(std::move(grid), std::move(vals));
}

GridPath GridPath::resample(TimeGridPtr target) const {
    if (grid_->same_points(*target)) return GridPath(std::move(target), values_);
    std::vector<double> vals(target->size());
    for (std::size_t i = 0; i < target->size(); ++i)
        vals[i] = values_[grid_->index_at(target->point(i))];
    return GridPath(std::move(target), std::move(vals));
}

BarrierPair BarrierPair::two_sided(GridPath l, GridPath u) {
    BarrierPair b{std::move(l), std::move(u)};
    b.validate();
    return b;
}

BarrierPair BarrierPair::lower_only(GridPath l) { return {std::move(l), std::nullopt}; }

BarrierPair BarrierPair::upper_only(GridPath u) { return {std::nullopt, std::move(u)}; }

void BarrierPair::validate() const {
    if (!lower || !upper) return;
    if (!lower->grid()->same_points(*upper->grid()))
        throw InvalidArgumentError("barrier paths must share one grid");
    for (std::size_t i = 0; i < lower->size(); ++i) {
        if (lower->value(i) > upper->value(i))
            throw InvalidArgumentError("lower barrier exceeds upper barrier at t=" +
                                       std::to_string(lower->grid()->point(i)));
    }
}

PiecewiseSpec PiecewiseSpec::constant(double value) {
    PiecewiseSpec s;
    PathSegment seg;
    seg.from = 0.0;
    seg.to = std::numeric_limits<double>::infinity();
    seg.value = value;
    s.segments.push_back(seg);
    return s;
}

PiecewiseSpec PiecewiseSpec::linear(double start, double slope) {
    PiecewiseSpec s;
    PathSegment first;
    first.from = 0.0;
    first.to = 0.0;
    first.value = start;
    PathSegment rest;
    rest.from = 0.0;
    rest.to = std::numeric_limits<double>::infinity();
    rest.slope = slope;
    // A zero-length leading segment only pins the starting value.
    s.segments.push_back(first);
    s.segments.push_back(rest);
    return s;
}

void PiecewiseSpec::validate() const {
    if (segments.empty()) throw InvalidArgumentError("piecewise path needs at least one segment");
    if (segments.front().from != 0.0)
        throw InvalidArgumentError("first piecewise segment must start at 0");
    double cursor = 0.0;
    for (const auto& seg : segments) {
        if (seg.from != cursor)
            throw InvalidArgumentError("piecewise segments must be contiguous");
        if (seg.to < seg.from) throw InvalidArgumentError("piecewise segment with to < from");
        if (seg.value && seg.slope)
            throw InvalidArgumentError("piecewise segment cannot set both value and slope");
        if (!seg.value && !seg.slope)
            throw InvalidArgumentError("piecewise segment needs value or slope");
        cursor = seg.to;
    }
    if (!segments.front().value)
        throw InvalidArgumentError("first piecewise segment must carry a value");
    double last = -1.0;
    for (const auto& j : jumps) {
        if (j.at <= last) throw InvalidArgumentError("piecewise jumps must be strictly ordered");
        if (j.at < 0.0) throw InvalidArgumentError("piecewise jump before time 0");
        last = j.at;
    }
}

double PiecewiseSpec::eval(double t) const {
    if (t < 0.0) throw InvalidArgumentError("piecewise evaluation before time 0");
    double running = *segments.front().value;
    std::size_t ji = 0;
    for (std::size_t si = 0; si < segments.size(); ++si) {
        const auto& seg = segments[si];
        const bool last = si + 1 == segments.size();
        const double end = last ? std::numeric_limits<double>::infinity() : seg.to;
        double anchor = seg.value ? *seg.value : running;
        double anchor_time = seg.from;
        const double slope = seg.slope ? *seg.slope : 0.0;
        // Jumps inside this segment up to t (a jump at the segment start
        // overrides the segment's own value).
        while (ji < jumps.size() && jumps[ji].at < end && jumps[ji].at <= t) {
            anchor = jumps[ji].to_value;
            anchor_time = jumps[ji].at;
            ++ji;
        }
        if (t < end || last) return anchor + slope * (t - anchor_time);
        running = anchor + slope * (seg.to - anchor_time);
    }
    return running;
}

GridPath PiecewiseSpec::sample(TimeGridPtr grid) const {
    validate();
    std::vector<double> vals(grid->size());
    for (std::size_t i = 0; i < grid->size(); ++i) vals[i] = eval(grid->point(i));
    return GridPath(std::move(grid), std::move(vals));
}

GridPath discretize(const std::function<double(double)>& source, long n, double q) {
    if (n < 1) throw InvalidArgumentError("discretization resolution n must be >= 1");
    if (!(q > 0.0)) throw InvalidArgumentError("discretization horizon must be positive");
    auto grid = TimeGrid::uniform(n, q);
    std::vector<double> vals(grid->size());
    for (std::size_t i = 0; i < grid->size(); ++i) vals[i] = source(grid->point(i));
    return GridPath(std::move(grid), std::move(vals));
}

GridPath discretize(const GridPath& source, long n, double q) {
    return discretize([&source](double t) { return source(t); }, n, q);
}

GridPath discretize(const PiecewiseSpec& source, long n, double q) {
    source.validate();
    return discretize([&source](double t) { return source.eval(t); }, n, q);
}

double total_variation(const GridPath& path, double q) {
    if (q > path.grid()->horizon())
        throw InvalidArgumentError("total variation horizon beyond grid horizon");
    const std::size_t last = path.grid()->index_at(q);
    double tv = 0.0;
    for (std::size_t i = 1; i <= last; ++i)
        tv += std::fabs(path.value(i) - path.value(i - 1));
    return tv;
}

long count_oscillations(const GridPath& path, double eta, double q) {
    if (!(eta > 0.0)) throw InvalidArgumentError("oscillation threshold eta must be positive");
    const std::size_t last = path.grid()->index_at(std::min(q, path.grid()->horizon()));
    long count = 0;
    double lo = path.value(0), hi = path.value(0);
    for (std::size_t i = 1; i <= last; ++i) {
        const double v = path.value(i);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        if (hi - lo > eta) {
            ++count;
            lo = hi = v;
        }
    }
    return count;
}

}  // namespace meanreflect
