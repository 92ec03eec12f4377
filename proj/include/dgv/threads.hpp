#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace dgv {

// Global worker cap shared by the computation modules. Results never depend
// on it: parallel loops write to index-addressed slots and all reductions
// happen afterwards in index order.
inline std::atomic<int>& thread_count_ref() {
    static std::atomic<int> n{1};
    return n;
}

inline void set_max_threads(int n) { thread_count_ref().store(n < 1 ? 1 : n); }
inline int max_threads() { return thread_count_ref().load(); }

template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
    const int workers = max_threads();
    if (workers <= 1 || n < 64) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto run = [&] {
        constexpr std::size_t chunk = 64;
        for (;;) {
            const std::size_t begin = next.fetch_add(chunk);
            if (begin >= n) break;
            const std::size_t end = begin + chunk < n ? begin + chunk : n;
            for (std::size_t i = begin; i < end; ++i) fn(i);
        }
    };
    std::vector<std::thread> pool;
    const int spawn = workers - 1;
    pool.reserve(static_cast<std::size_t>(spawn));
    for (int t = 0; t < spawn; ++t) pool.emplace_back(run);
    run();
    for (auto& th : pool) th.join();
}

}  // namespace dgv
