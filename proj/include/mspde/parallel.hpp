#pragma once

#include <cstdlib>
#include <functional>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mspde {

/// Worker count resolution: explicit argument > MONOTONE_SPDE_THREADS env
/// var > OpenMP default.
inline int resolve_thread_count(int requested = 0) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("MONOTONE_SPDE_THREADS")) {
        int n = std::atoi(env);
        if (n > 0) return n;
    }
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

/// Serial reference driver. Kept alongside the OpenMP driver so tests can
/// assert bit-identical results and the benchmark can compare them.
template <typename Fn>
void for_each_index_serial(int count, Fn&& fn) {
    for (int i = 0; i < count; ++i) fn(i);
}

/// OpenMP driver over independent work items (Monte Carlo paths, random
/// probe sweeps). Each item must write only to its own output slot; with
/// per-index RNG streams the result is independent of the thread count.
template <typename Fn>
void for_each_index_parallel(int count, Fn&& fn, int threads = 0) {
#ifdef _OPENMP
    const int nthreads = resolve_thread_count(threads);
#pragma omp parallel for schedule(dynamic, 1) num_threads(nthreads)
    for (int i = 0; i < count; ++i) fn(i);
#else
    (void)threads;
    for_each_index_serial(count, fn);
#endif
}

/// Dispatch used by the experiment drivers; `parallel = false` selects the
/// serial reference implementation.
template <typename Fn>
void for_each_index(int count, Fn&& fn, bool parallel, int threads = 0) {
    if (parallel)
        for_each_index_parallel(count, fn, threads);
    else
        for_each_index_serial(count, fn);
}

} // namespace mspde
