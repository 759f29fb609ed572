/**
 * @file parallel.hpp
 * @brief Static-partition parallel loop over an index range.
 */
#pragma once

#include <cstddef>
#include <functional>

namespace hcinv {

/// 0 means "use hardware concurrency".
unsigned resolve_threads(unsigned requested);

/// Calls fn(i) for i in [0, n). Indices are split into contiguous blocks,
/// so results written by index are independent of the thread count. The
/// first exception thrown by any worker is rethrown on the caller.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

}  // namespace hcinv
