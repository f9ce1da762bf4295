#pragma once

#include <cstddef>
#include <functional>

namespace clab {

// Worker count: CLAB_THREADS if set to a positive integer, else the hardware
// concurrency (at least 1).
int thread_count();

// Calls body(i) for i in [0, n) on up to thread_count() threads. Each index is
// visited exactly once; results must be written to per-index slots.
// The first exception thrown by any body is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace clab
