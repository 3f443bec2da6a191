#pragma once

#include <cstddef>
#include <functional>

namespace well {

/// Worker count: hardware concurrency, capped by WELL_ECHO_THREADS when set.
unsigned worker_count();

/// Calls body(begin, end) over contiguous chunks of [0, n) on worker threads.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace well
