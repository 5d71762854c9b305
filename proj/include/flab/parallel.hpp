#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace flab {

/// Execution settings shared by the counting and certification routines.
struct exec_policy {
    unsigned threads = 1;
};

/// Runs f(i) for i in [0, n) over contiguous blocks, one block per worker.
/// Callers write results into per-index slots and reduce in index order.
template <class F>
void parallel_for(std::size_t n, const exec_policy& ex, F&& f) {
    const std::size_t workers =
        std::max<std::size_t>(1, std::min<std::size_t>(ex.threads, n));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) {
            f(i);
        }
        return;
    }
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t lo = n * w / workers;
        const std::size_t hi = n * (w + 1) / workers;
        pool.emplace_back([&, lo, hi] {
            try {
                for (std::size_t i = lo; i < hi; ++i) {
                    f(i);
                }
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

}  // namespace flab
