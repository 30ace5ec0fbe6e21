#pragma once

#include <cstddef>
#include <functional>

namespace anigreen {

// Worker count: hardware concurrency, capped by ANIGREEN_THREADS when set.
unsigned worker_count();

// Runs body(i) for i in [0, n). Each index is visited exactly once; callers
// write results into preallocated slots so output order never depends on
// scheduling. Exceptions from workers are rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace anigreen
