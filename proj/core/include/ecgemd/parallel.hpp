#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace ecgemd {

/// Runs fn(i) for i in [0, count) on up to `workers` threads. Work is handed
/// out by an atomic counter; callers write results by index so output order
/// never depends on scheduling. The first exception thrown is rethrown after
/// all workers stop.
template <typename Fn>
void parallel_for(std::size_t count, std::size_t workers, Fn&& fn) {
    workers = std::max<std::size_t>(1, std::min(workers, count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                while (!failed.load(std::memory_order_relaxed)) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= count) break;
                    try {
                        fn(i);
                    } catch (...) {
                        std::lock_guard lock(error_mutex);
                        if (!error) error = std::current_exception();
                        failed = true;
                    }
                }
            });
        }
    }
    if (error) std::rethrow_exception(error);
}

}  // namespace ecgemd
