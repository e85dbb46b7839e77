#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace varlearn {

// Library-wide worker count. 1 by default; the CLI maps --threads here.
// Parallelized loops assign disjoint index ranges, so results are bitwise
// independent of the thread count.
inline int& max_threads() {
    static int value = 1;
    return value;
}

inline void set_max_threads(int t) { max_threads() = t < 1 ? 1 : t; }

// Runs fn(i) for i in [0, count) on up to max_threads() workers.
template <typename Fn>
void parallel_for(std::size_t count, Fn&& fn) {
    const int threads = std::min<std::size_t>(max_threads(), count);
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    const std::size_t chunk = (count + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        const std::size_t lo = t * chunk;
        const std::size_t hi = std::min(count, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (std::size_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace varlearn
