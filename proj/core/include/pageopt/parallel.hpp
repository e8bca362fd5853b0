#pragma once

#include <cstddef>
#include <functional>

namespace pageopt {

// Worker-count limit for seed fan-out: the PAGE_OPT_THREADS environment
// variable when set to a positive integer, otherwise the hardware count.
std::size_t worker_limit();

// Run fn(0), ..., fn(count-1) on up to max_threads workers. Falls back to a
// plain loop for a single worker. The first exception thrown by any task is
// rethrown after all workers finish.
void parallel_for_index(std::size_t count, std::size_t max_threads,
                        const std::function<void(std::size_t)>& fn);

}  // namespace pageopt
