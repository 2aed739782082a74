#pragma once

#include <cstddef>
#include <functional>

namespace meandim {

// Worker count: MEANDIM_THREADS if set to a positive integer, otherwise the
// hardware concurrency (at least 1).
std::size_t thread_count();

// Calls body(begin, end) on disjoint chunks covering [0, n). Chunks may run
// concurrently; callers write only to per-index or per-chunk state.
void parallel_chunks(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace meandim
