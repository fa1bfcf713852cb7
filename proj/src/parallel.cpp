#include "meanreflect/parallel.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <thread>
#include <vector>

namespace meanreflect {

namespace {

std::atomic<int> g_workers{0};  // 0 = not initialised yet

int init_from_env() {
    if (const char* env = std::getenv("MEANREFLECT_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    return 1;
}

}  // namespace

int worker_count() {
    int n = g_workers.load(std::memory_order_relaxed);
    if (n == 0) {
        n = init_from_env();
        g_workers.store(n, std::memory_order_relaxed);
    }
    return n;
}

void set_worker_count(int n) {
    g_workers.store(n >= 1 ? n : 1, std::memory_order_relaxed);
}

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& chunk_fn) {
    const int workers = worker_count();
    if (workers <= 1 || n < 2048) {
        chunk_fn(0, n);
        return;
    }
    const std::size_t chunk = (n + workers - 1) / workers;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        const std::size_t begin = std::min(n, static_cast<std::size_t>(w) * chunk);
        const std::size_t end = std::min(n, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&chunk_fn, begin, end] { chunk_fn(begin, end); });
    }
    for (auto& t : pool) t.join();
}

double pairwise_sum(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n == 0) return 0.0;
    if (n <= 8) {
        double s = values[0];
        for (std::size_t i = 1; i < n; ++i) s += values[i];
        return s;
    }
    std::size_t half = 1;
    while (half * 2 < n) half *= 2;
    return pairwise_sum(values.subspan(0, half)) + pairwise_sum(values.subspan(half));
}

double mean(std::span<const double> values) {
    return pairwise_sum(values) / static_cast<double>(values.size());
}

double stddev(std::span<const double> values, double mean_value) {
    const std::size_t n = values.size();
    if (n == 0) return 0.0;
    std::vector<double> sq(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double d = values[i] - mean_value;
        sq[i] = d * d;
    }
    return std::sqrt(pairwise_sum(sq) / static_cast<double>(n));
}

}  // namespace meanreflect
