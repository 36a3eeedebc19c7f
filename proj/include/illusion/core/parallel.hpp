#pragma once

#include <cstdint>
#include <utility>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace illusion::par {

inline int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

// n == 0 keeps the runtime default.
inline void set_threads(int n) {
#ifdef _OPENMP
    if (n > 0) omp_set_num_threads(n);
#else
    (void)n;
#endif
}

template <class F>
inline void for_n(int64_t n, F&& body) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
    for (int64_t i = 0; i < n; ++i) body(i);
#else
    for (int64_t i = 0; i < n; ++i) body(i);
#endif
}

// Number of fixed reduction blocks. Reductions accumulate per block and
// combine the partials in block order, so results do not depend on the
// thread count.
inline constexpr int kReduceBlocks = 64;

inline std::pair<int64_t, int64_t> block_range(int64_t n, int block, int nblocks) {
    const int64_t lo = n * block / nblocks;
    const int64_t hi = n * (block + 1) / nblocks;
    return {lo, hi};
}

// Deterministic parallel sum of value_at(i) for i in [0, n).
template <class F>
inline double block_sum(int64_t n, F&& value_at) {
    double partial[kReduceBlocks] = {};
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (int b = 0; b < kReduceBlocks; ++b) {
        auto [lo, hi] = block_range(n, b, kReduceBlocks);
        double s = 0.0;
        for (int64_t i = lo; i < hi; ++i) s += value_at(i);
        partial[b] = s;
    }
    double total = 0.0;
    for (int b = 0; b < kReduceBlocks; ++b) total += partial[b];
    return total;
}

}  // namespace illusion::par
