#ifndef RELKIT_PARALLEL_HPP
#define RELKIT_PARALLEL_HPP

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace relkit {

/// Worker count used by the box-wise loops (1 = run inline).
void set_thread_count(int threads);
int thread_count();

namespace detail {
/// Set on worker threads so nested loops run inline.
inline thread_local bool in_worker = false;
}  // namespace detail

/// Calls fn(i) for i in [0, n), split into contiguous chunks across workers.
/// fn must only write to slots owned by i; results are schedule-independent.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
    const auto workers = static_cast<std::size_t>(thread_count());
    if (workers <= 1 || n < 2 * workers || detail::in_worker) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(n, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&, begin, end] {
            detail::in_worker = true;
            try {
                for (std::size_t i = begin; i < end; ++i) fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace relkit

#endif  // RELKIT_PARALLEL_HPP
