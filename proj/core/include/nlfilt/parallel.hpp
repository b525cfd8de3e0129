#pragma once

#include <cstddef>
#include <functional>

namespace nlfilt {

/// Process-wide worker count used by row-parallel loops (default 1).
void set_thread_count(int threads);
int thread_count();

/// Splits [0, count) into contiguous blocks and runs body(lo, hi) on each.
/// Every index is handled by exactly one call, so per-index work that does
/// not share accumulators gives identical results for any thread count.
void parallel_for(std::size_t count, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace nlfilt
