#ifndef ASDIM_EXEC_HPP
#define ASDIM_EXEC_HPP

#ifdef _OPENMP
#include <omp.h>
#endif

namespace asdim {

// Every kernel has a serial reference implementation; the parallel one must
// produce bit-identical results (all reductions are exact and commutative).
enum class Exec { Serial, Parallel };

inline int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

} // namespace asdim

#endif
