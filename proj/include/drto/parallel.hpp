#pragma once

#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace drto {

/// Worker-thread count from the DRTO_THREADS environment variable (default 1).
inline int worker_threads() {
    const char* env = std::getenv("DRTO_THREADS");
    if (!env) return 1;
    const int n = std::atoi(env);
    return n >= 1 ? n : 1;
}

/// Runs fn(i) for i in [0, n). Each index writes only its own outputs, so
/// results are identical for any thread count; reductions happen afterwards
/// in index order.
inline void parallel_for(int n, const std::function<void(int)>& fn) {
    const int threads = std::min(worker_threads(), n);
    if (threads <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::mutex error_mutex;
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&, t]() {
            try {
                for (int i = t; i < n; i += threads) fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace drto
