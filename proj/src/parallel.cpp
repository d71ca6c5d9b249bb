#include "cognet/parallel.hpp"

#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace cognet {

int apply_thread_cap() {
#ifdef _OPENMP
    if (const char* env = std::getenv("COGNET_THREADS")) {
        int cap = std::atoi(env);
        if (cap > 0) {
            omp_set_num_threads(cap);
            return cap;
        }
    }
    return omp_get_max_threads();
#else
    return 1;
#endif
}

int effective_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

} // namespace cognet
