#pragma once

#include <cstddef>
#include <functional>

namespace suprec {

/// Worker count for a requested value; 0 means hardware concurrency.
unsigned resolve_threads(unsigned requested) noexcept;

/// Calls body(i) for every i in [0, count) on up to `threads` workers.
/// Indices are claimed dynamically, so callers must write results into
/// per-index slots and reduce afterwards in index order. The first exception
/// thrown by any body is rethrown on the calling thread.
void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace suprec
