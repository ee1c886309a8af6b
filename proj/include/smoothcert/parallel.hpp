#pragma once

#include <atomic>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace smoothcert {

/// Worker count: SMOOTHCERT_THREADS caps the pool, hardware concurrency is
/// the default, and at least one worker always runs.
inline unsigned worker_count(std::size_t jobs) {
    unsigned n = std::thread::hardware_concurrency();
    if (n == 0) n = 1;
    if (const char* env = std::getenv("SMOOTHCERT_THREADS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap >= 1 && static_cast<unsigned>(cap) < n) n = static_cast<unsigned>(cap);
    }
    if (jobs < n) n = static_cast<unsigned>(jobs ? jobs : 1);
    return n;
}

/// Runs fn(0..n-1) on a small pool. Each index is processed exactly once;
/// callers store results into index-addressed slots and reduce in index
/// order afterwards, so the outcome never depends on the worker count.
/// The first exception thrown by any worker is rethrown after the join.
inline void parallel_for_index(std::size_t n, const std::function<void(std::size_t)>& fn) {
    const unsigned workers = worker_count(n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mu;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    const std::lock_guard<std::mutex> lock(error_mu);
                    if (!error) error = std::current_exception();
                    next.store(n);
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace smoothcert
