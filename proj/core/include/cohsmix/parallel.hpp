#pragma once

#include <cstddef>
#include <functional>

namespace cohsmix {

/// Worker cap: COHSMIX_THREADS when set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
unsigned default_thread_count();

/// Runs body(i) for i in [0, count) on up to `threads` workers. Each index is
/// handled exactly once; the first exception thrown by any body is rethrown
/// after all workers finish.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body);

}  // namespace cohsmix
