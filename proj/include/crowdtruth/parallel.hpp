#pragma once

#include <cstddef>
#include <functional>

namespace crowdtruth {

// Worker cap: CROWDTRUTH_THREADS if set (minimum 1), else hardware concurrency.
int max_threads();

// Run body(0..count-1) across up to max_threads() workers. Each index is
// processed exactly once; callers write results into per-index slots so the
// outcome is identical to the serial loop. The first exception thrown by any
// body is rethrown on the calling thread.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace crowdtruth
