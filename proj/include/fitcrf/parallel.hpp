#pragma once

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fitcrf {

// Deterministic data parallelism: every parallel loop in this codebase maps
// independent items to preallocated slots with per-item derived seeds, so the
// output is bit-identical for any thread count, including 1.

inline int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

/// Caps the number of OpenMP threads used by parallel_for. 0 restores the
/// runtime default.
void set_max_threads(int n);
int configured_threads();

template <typename Fn>
void serial_for(std::size_t n, Fn&& fn) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
}

template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
#ifdef _OPENMP
    const int threads = configured_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
        fn(static_cast<std::size_t>(i));
    }
#else
    serial_for(n, fn);
#endif
}

}  // namespace fitcrf
