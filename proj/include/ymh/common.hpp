/// @file common.hpp
/// @brief Shared scalar/matrix aliases, deterministic parallel reduction, small utilities.
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace ymh {

// Fiber rank is tiny (r <= 8), chart dimension n <= 7, ambient n+1 <= 8.
// Fixed-capacity Eigen types keep everything on the stack.
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 8, 8>;
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 8, 1>;

constexpr int kMaxDim = 8;

inline int thread_count() {
    if (const char* env = std::getenv("YMH_THREADS")) {
        int t = std::atoi(env);
        if (t >= 1) return t;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

/// Chunked parallel map-reduce with a thread-count-independent summation order.
/// Each chunk accumulates sequentially into its own slot; slots are summed in
/// index order, so the result is bit-identical no matter how many workers run.
template <typename BodyFn>
double parallel_sum(std::int64_t count, std::int64_t grain, BodyFn&& body) {
    if (count <= 0) return 0.0;
    if (grain <= 0) grain = 1;
    const std::int64_t nchunks = (count + grain - 1) / grain;
    std::vector<double> partial(static_cast<size_t>(nchunks), 0.0);
    int workers = thread_count();
    if (workers > nchunks) workers = static_cast<int>(nchunks);

    auto run_chunks = [&](std::int64_t c0, std::int64_t c1) {
        for (std::int64_t c = c0; c < c1; ++c) {
            const std::int64_t lo = c * grain;
            const std::int64_t hi = std::min(count, lo + grain);
            double acc = 0.0;
            for (std::int64_t i = lo; i < hi; ++i) acc += body(i);
            partial[static_cast<size_t>(c)] = acc;
        }
    };

    if (workers <= 1) {
        run_chunks(0, nchunks);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<size_t>(workers));
        const std::int64_t per = (nchunks + workers - 1) / workers;
        for (int w = 0; w < workers; ++w) {
            const std::int64_t c0 = w * per;
            const std::int64_t c1 = std::min<std::int64_t>(nchunks, c0 + per);
            if (c0 >= c1) break;
            pool.emplace_back(run_chunks, c0, c1);
        }
        for (auto& t : pool) t.join();
    }
    double total = 0.0;
    for (double p : partial) total += p;
    return total;
}

/// Plain parallel loop over [0, count).
template <typename BodyFn>
void parallel_for(std::int64_t count, BodyFn&& body) {
    int workers = thread_count();
    if (workers <= 1 || count < 2) {
        for (std::int64_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    const std::int64_t per = (count + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        const std::int64_t i0 = w * per;
        const std::int64_t i1 = std::min<std::int64_t>(count, i0 + per);
        if (i0 >= i1) break;
        pool.emplace_back([i0, i1, &body] {
            for (std::int64_t i = i0; i < i1; ++i) body(i);
        });
    }
    for (auto& t : pool) t.join();
}

// FNV-1a, used for config hashes embedded in reports.
inline std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace ymh
