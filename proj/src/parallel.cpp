#include "whsboost/parallel.hpp"

#include <atomic>

#ifdef WHSBOOST_HAVE_OPENMP
#include <omp.h>
#endif

namespace whsboost::parallel {

namespace {
std::atomic<int> g_workers{1};
}

void set_worker_count(int n) { g_workers.store(n < 1 ? 1 : n); }

int worker_count() { return g_workers.load(); }

bool use_parallel() {
#ifdef WHSBOOST_HAVE_OPENMP
    return g_workers.load() > 1 && !omp_in_parallel();
#else
    return false;
#endif
}

}  // namespace whsboost::parallel
