#pragma once

#include <algorithm>
#include <thread>
#include <vector>

namespace fraclab {

/// Static block-partitioned parallel loop. Results must go to preallocated
/// per-index slots so the schedule cannot affect any outcome; reductions
/// happen serially afterwards.
template <typename F>
void parallel_for(int n, int threads, F&& body) {
    threads = std::clamp(threads, 1, 64);
    if (threads == 1 || n < 2 * threads) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(threads));
    const int chunk = (n + threads - 1) / threads;
    for (int tix = 0; tix < threads; ++tix) {
        const int lo = tix * chunk, hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &body] {
            for (int i = lo; i < hi; ++i) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

/// Hardware-derived default honoring the FRACLAB_THREADS environment variable.
int default_threads();

}  // namespace fraclab
