#pragma once

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

namespace relucov {

// Runs body(i) for i in [0, n). Work is split into contiguous chunks, one per
// worker, so results written to per-index slots are deterministic regardless
// of the worker count. workers <= 1 runs serially.
template <typename Body>
void parallel_for(int n, int workers, Body&& body) {
    if (n <= 0) return;
    workers = std::max(1, std::min(workers, n));
    if (workers == 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> threads;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    const int chunk = (n + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        const int begin = w * chunk;
        const int end = std::min(n, begin + chunk);
        threads.emplace_back([&, w, begin, end] {
            try {
                for (int i = begin; i < end; ++i) body(i);
            } catch (...) {
                errors[static_cast<std::size_t>(w)] = std::current_exception();
            }
        });
    }
    for (auto& t : threads) t.join();
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
}

} // namespace relucov
