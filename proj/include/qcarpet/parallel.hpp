#pragma once

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace qcarpet {

/// Sets the OpenMP thread count for the lifetime of the object.
class ThreadCountScope {
public:
    explicit ThreadCountScope(int threads) {
#if defined(_OPENMP)
        previous_ = omp_get_max_threads();
        if (threads > 0) omp_set_num_threads(threads);
#else
        (void)threads;
#endif
    }
    ~ThreadCountScope() {
#if defined(_OPENMP)
        omp_set_num_threads(previous_);
#endif
    }
    ThreadCountScope(const ThreadCountScope&) = delete;
    ThreadCountScope& operator=(const ThreadCountScope&) = delete;

private:
    int previous_ = 1;
};

inline int max_threads() {
#if defined(_OPENMP)
    return omp_get_max_threads();
#else
    return 1;
#endif
}

} // namespace qcarpet
