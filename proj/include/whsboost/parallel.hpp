#pragma once

#include <cstddef>

namespace whsboost::parallel {

// Worker count for the OpenMP kernels. 1 (the default) selects the serial
// reference paths; anything larger enables the parallel variants. The CLI
// wires this to WHSBOOST_WORKERS; library callers set it explicitly.
void set_worker_count(int n);
int worker_count();

// True when parallel dispatch should happen at this call site: worker count
// above one, OpenMP compiled in, and not already inside a parallel region
// (inner kernels fall back to serial under an outer parallel loop).
bool use_parallel();

}  // namespace whsboost::parallel
