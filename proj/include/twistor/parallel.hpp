#pragma once

#include <atomic>
#include <functional>
#include <thread>
#include <vector>

namespace twistor {

// Index-parallel loop with a deterministic contract: fn(i) must depend only on
// i (plus read-only captures), so results are identical for any thread count.
// Reductions are done by the caller, in index order, after the loop.
inline void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
    if (threads <= 1 || count <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    auto worker = [&]() {
        for (;;) {
            int i = next.fetch_add(1);
            if (i >= count) return;
            fn(i);
        }
    };
    std::vector<std::thread> pool;
    int nw = std::min(threads, count);
    pool.reserve(static_cast<std::size_t>(nw));
    for (int t = 0; t < nw; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

} // namespace twistor
