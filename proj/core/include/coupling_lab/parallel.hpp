#pragma once

#include <cstddef>
#include <functional>

namespace coupling_lab {

/// Worker count: COUPLING_LAB_THREADS if set (>= 1), else hardware concurrency.
unsigned worker_count();

/// Overrides the worker count for the current process; 0 restores the default.
void set_worker_count(unsigned workers);

/// Calls body(begin, end) over disjoint chunks covering [0, n). Chunk
/// boundaries do not depend on the worker count, and callers write results
/// into index-addressed storage, so output is independent of parallelism.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body,
                  std::size_t chunk = 256);

}  // namespace coupling_lab
