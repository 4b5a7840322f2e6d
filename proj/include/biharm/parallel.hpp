#pragma once

#include <exception>
#include <mutex>

namespace biharm {

/// Worker count: BIHARM_THREADS when set to a positive integer, otherwise the
/// OpenMP default (1 without OpenMP).
int worker_count();

/// Runs f(i) for i in [0, n). Iterations must be independent. The first
/// exception thrown by any iteration is rethrown on the calling thread.
template <class F>
void parallel_for(int n, F&& f) {
    std::exception_ptr error;
    std::mutex error_mutex;
    [[maybe_unused]] const int workers = worker_count();
#pragma omp parallel for schedule(dynamic, 256) num_threads(workers)
    for (int i = 0; i < n; ++i) {
        try {
            f(i);
        } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);
}

} // namespace biharm
