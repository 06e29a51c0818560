#pragma once

#include <cstddef>
#include <functional>

namespace psde {

/// Worker count: PSDE_THREADS when set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
std::size_t default_thread_count();

/// Runs body(i) for i in [0, n) on up to `threads` workers using contiguous
/// blocks. The first exception thrown by any worker is rethrown after all
/// workers join. Results must be written to per-index slots by the caller.
void parallel_for(std::size_t n, std::size_t threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace psde
