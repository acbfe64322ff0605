#pragma once
#include <algorithm>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace coarse {

// Thread cap: min(hardware_concurrency, COARSE_EMBED_THREADS). 0/unset = no cap.
inline int thread_count() {
    static const int cached = [] {
        int hw = static_cast<int>(std::thread::hardware_concurrency());
        if (hw <= 0) hw = 1;
        if (const char* env = std::getenv("COARSE_EMBED_THREADS")) {
            int cap = std::atoi(env);
            if (cap > 0) hw = std::min(hw, cap);
        }
        return hw;
    }();
    return cached;
}

// Runs fn(i) for i in [0,n). Work is split into contiguous chunks; results must be
// written to preallocated per-index slots so the outcome is independent of scheduling.
inline void parallel_for(int n, const std::function<void(int)>& fn) {
    int nt = std::min(thread_count(), n);
    if (nt <= 1 || n < 32) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(nt);
    int chunk = (n + nt - 1) / nt;
    for (int t = 0; t < nt; ++t) {
        int lo = t * chunk, hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (int i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace coarse
