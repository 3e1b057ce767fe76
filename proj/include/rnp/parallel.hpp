#pragma once

#include <cstddef>
#include <functional>

namespace rnp {

/// Worker count: RNP_THREADS if set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
int default_thread_count();

/// Runs body(i) for i in [0, count) on up to `threads` workers. Each index
/// runs exactly once; callers write results into per-index slots.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body);

}  // namespace rnp
