#pragma once

#include <cstddef>
#include <functional>

namespace semorder {

/// Hardware concurrency, at least 1.
unsigned default_threads();

/// Runs body(i) for i in [0, count) on up to `threads` worker threads.
/// Work is split into contiguous static blocks. The first exception (by
/// task index) is rethrown on the calling thread after all workers join.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body);

}  // namespace semorder
