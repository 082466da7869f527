#pragma once

#include <cstddef>
#include <functional>

namespace emff {

/// Worker count: EMFF_THREADS when set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
int configured_threads();

/// Runs fn(i) for i in [0, count) on up to `threads` workers. Each index is
/// processed exactly once; if any call throws, the exception from the
/// lowest failing index is rethrown after all workers finish.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace emff
