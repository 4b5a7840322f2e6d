#include "biharm/parallel.hpp"

#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace biharm {

int worker_count() {
    static const int count = [] {
        if (const char* env = std::getenv("BIHARM_THREADS")) {
            try {
                const int n = std::stoi(env);
                if (n > 0) return n;
            } catch (const std::exception&) {
            }
        }
#ifdef _OPENMP
        return omp_get_max_threads();
#else
        return 1;
#endif
    }();
    return count;
}

} // namespace biharm
