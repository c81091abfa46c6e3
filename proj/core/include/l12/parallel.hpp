#pragma once

#include <cstddef>
#include <functional>

namespace l12 {

/// Worker count: L12LAB_THREADS when set to a positive integer, otherwise
/// std::thread::hardware_concurrency() (at least 1).
unsigned worker_count();

/// Calls body(i) for every i in [0, n). Work is split into fixed contiguous
/// chunks, so callers that write results by index get the same output for
/// any thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace l12
