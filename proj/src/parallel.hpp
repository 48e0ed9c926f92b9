#pragma once

#include <algorithm>
#include <atomic>
#include <functional>
#include <thread>
#include <vector>

namespace veinforge::detail {

// Runs fn(i) for i in [0, n) on a small thread pool. Callers write to
// disjoint slots, so the result is order-independent and deterministic.
inline void parallel_for(size_t n, const std::function<void(size_t)>& fn) {
    unsigned hw = std::thread::hardware_concurrency();
    size_t workers = std::min<size_t>(hw ? hw : 1, n);
    if (workers <= 1) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (size_t t = 0; t < workers; ++t) {
        pool.emplace_back([&]() {
            for (size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1))
                fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace veinforge::detail
