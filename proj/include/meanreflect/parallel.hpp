#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace meanreflect {

// Worker count used by data-parallel particle loops. Results are required to
// be bit-identical for every setting: workers only fill disjoint ranges of
// pre-sized buffers, and every reduction runs in a fixed shape afterwards.
// Controlled by set_worker_count() or the MEANREFLECT_THREADS environment
// variable (read once at first use).
int worker_count();
void set_worker_count(int n);

// Runs fn(i) for i in [0, n), split into contiguous chunks across workers.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& chunk_fn);

// Fixed-shape pairwise sum: splits at the largest power of two below the
// length. Independent of worker count by construction.
double pairwise_sum(std::span<const double> values);

// pairwise_sum(values) / values.size().
double mean(std::span<const double> values);

// Population standard deviation sqrt(mean((x - mean)^2)), pairwise reduced.
double stddev(std::span<const double> values, double mean_value);

}  // namespace meanreflect
