#pragma once

#include <cstddef>
#include <exception>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qfs {

/// Selects the OpenMP kernel or the plain serial reference loop. Both
/// produce bit-identical results; the serial path is kept for testing.
enum class Exec { Serial, Parallel };

inline void set_thread_count(int n) {
#ifdef _OPENMP
    if (n > 0) {
        omp_set_num_threads(n);
    }
#else
    (void)n;
#endif
}

inline int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

/// Runs body(i) for i in [0, n). Iterations must write disjoint outputs.
template <class Body> void parallel_for(std::size_t n, Exec exec, Body &&body) {
    if (exec == Exec::Serial) {
        for (std::size_t i = 0; i < n; ++i) {
            body(i);
        }
        return;
    }
    // Exceptions cannot cross the OpenMP region; keep the lowest-index one
    // so the rethrown error matches the serial path.
    std::exception_ptr error;
    std::size_t error_index = std::numeric_limits<std::size_t>::max();
    const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 1)
    for (long long i = 0; i < count; ++i) {
        try {
            body(static_cast<std::size_t>(i));
        } catch (...) {
#pragma omp critical(qfs_parallel_for_error)
            {
                if (static_cast<std::size_t>(i) < error_index) {
                    error_index = static_cast<std::size_t>(i);
                    error = std::current_exception();
                }
            }
        }
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

} // namespace qfs
