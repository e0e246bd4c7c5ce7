#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace tofslam {

/// Runs fn(begin, end) over contiguous chunks of [0, n). Chunks are disjoint, so any
/// per-index work produces identical results regardless of `workers`.
template <typename Fn>
void parallel_chunks(std::size_t n, unsigned workers, Fn&& fn) {
    workers = std::max(1u, workers);
    if (workers == 1 || n < 2 * static_cast<std::size_t>(workers)) {
        fn(std::size_t{0}, n);
        return;
    }
    const std::size_t chunk = (n + workers - 1) / workers;
    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    for (unsigned w = 1; w < workers; ++w) {
        const std::size_t b = std::min(n, w * chunk);
        const std::size_t e = std::min(n, b + chunk);
        if (b < e) {
            pool.emplace_back([&fn, b, e] { fn(b, e); });
        }
    }
    fn(std::size_t{0}, std::min(n, chunk));
}

}  // namespace tofslam
