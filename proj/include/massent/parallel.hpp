// parallel.hpp: index-parallel loop over independent work items.

#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace massent {

/// Runs fn(i) for i in [0, n) on up to `threads` workers (0: hardware
/// concurrency). Each index runs exactly once. If any call throws, the
/// exception from the lowest failing index is rethrown, so the outcome does
/// not depend on scheduling.
template <class Fn>
void parallel_for(std::size_t n, std::size_t threads, Fn&& fn) {
    if (n == 0) return;
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, n);

    std::vector<std::exception_ptr> errors(n);
    if (threads == 1) {
        for (std::size_t i = 0; i < n; ++i) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
                break;
            }
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::atomic<bool> failed{false};
        {
            std::vector<std::jthread> pool;
            pool.reserve(threads);
            for (std::size_t w = 0; w < threads; ++w) {
                pool.emplace_back([&] {
                    for (std::size_t i = next++; i < n && !failed; i = next++) {
                        try {
                            fn(i);
                        } catch (...) {
                            errors[i] = std::current_exception();
                            failed = true;
                        }
                    }
                });
            }
        }
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

}  // namespace massent
