#ifndef ASDIM_KERNELS_HPP
#define ASDIM_KERNELS_HPP

#include <vector>

#include "asdim/exec.hpp"

namespace asdim {
namespace kern {

// Data-parallel loop skeletons.  The OpenMP versions split the index range,
// reduce thread-locally and merge; since all accumulators are exact values
// combined with commutative operations, results match the serial reference
// exactly.

// Fold f(i) for i in [0,n) with a binary merge.  Acc must be copyable.
template <class Acc, class F, class Merge>
Acc fold_index(long long n, Acc init, F&& f, Merge&& merge, Exec mode) {
    if (mode == Exec::Serial) {
        Acc acc = init;
        for (long long i = 0; i < n; ++i) acc = merge(acc, f(i));
        return acc;
    }
#ifdef _OPENMP
    Acc acc = init;
#pragma omp parallel
    {
        Acc local = init;
#pragma omp for schedule(dynamic, 16) nowait
        for (long long i = 0; i < n; ++i) local = merge(local, f(i));
#pragma omp critical(asdim_fold_index)
        acc = merge(acc, local);
    }
    return acc;
#else
    Acc acc = init;
    for (long long i = 0; i < n; ++i) acc = merge(acc, f(i));
    return acc;
#endif
}

// Fold f(i,j) over unordered pairs 0 <= i < j < n.
template <class Acc, class F, class Merge>
Acc fold_pairs(int n, Acc init, F&& f, Merge&& merge, Exec mode) {
    auto row = [&](long long i) {
        Acc acc = init;
        for (int j = int(i) + 1; j < n; ++j) acc = merge(acc, f(int(i), j));
        return acc;
    };
    return fold_index<Acc>(n, init, row, merge, mode);
}

// Early-exit existence scan over indices; the short-circuit is advisory in
// the parallel version (threads poll a shared flag).
template <class Pred>
bool any_index(long long n, Pred&& pred, Exec mode) {
    if (mode == Exec::Serial) {
        for (long long i = 0; i < n; ++i)
            if (pred(i)) return true;
        return false;
    }
#ifdef _OPENMP
    volatile bool found = false;
#pragma omp parallel for schedule(dynamic, 16)
    for (long long i = 0; i < n; ++i) {
        if (found) continue;
        if (pred(i)) found = true;
    }
    return found;
#else
    for (long long i = 0; i < n; ++i)
        if (pred(i)) return true;
    return false;
#endif
}

template <class F>
void for_index(long long n, F&& f, Exec mode) {
    if (mode == Exec::Serial) {
        for (long long i = 0; i < n; ++i) f(i);
        return;
    }
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 16)
    for (long long i = 0; i < n; ++i) f(i);
#else
    for (long long i = 0; i < n; ++i) f(i);
#endif
}

} // namespace kern
} // namespace asdim

#endif
