#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace k2d::detail {

/// Worker count: $K2D_THREADS if set to a positive integer, otherwise the
/// hardware concurrency.
inline unsigned thread_count() {
    if (const char *env = std::getenv("K2D_THREADS"); env != nullptr) {
        try {
            const int n = std::stoi(env);
            if (n > 0) {
                return static_cast<unsigned>(n);
            }
        } catch (const std::exception &) {
            // ignore malformed values
        }
    }
    return std::max(1U, std::thread::hardware_concurrency());
}

/// Runs body(i) for i in [0, n). Each index is visited exactly once; the first
/// exception thrown by any worker is rethrown on the calling thread.
template <class Body>
void parallel_for(std::size_t n, Body &&body) {
    const unsigned workers = std::min<std::size_t>(thread_count(), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            body(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
                    try {
                        body(i);
                    } catch (...) {
                        std::scoped_lock lock(failure_mutex);
                        if (!failure) {
                            failure = std::current_exception();
                        }
                        next.store(n);
                    }
                }
            });
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

}  // namespace k2d::detail
