#pragma once

#include <cstddef>
#include <functional>

namespace responsekit {

// Worker count: RESPONSEKIT_THREADS if set (>=1), else hardware concurrency.
std::size_t thread_count();

// Runs body(i) for i in [0, n) over a static partition of contiguous chunks.
// Callers write results into per-index slots and reduce serially afterwards,
// so outputs never depend on the schedule. The first exception thrown by any
// worker is rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace responsekit
