#pragma once

#include <cstddef>
#include <functional>

namespace hcert {

/// Worker count for grid scans: hardware concurrency, capped by the
/// HALANAY_THREADS environment variable when it holds a positive integer.
std::size_t worker_count();

/// Calls body(i) for i in [0, n) on up to worker_count() threads. Each index
/// is visited exactly once; body must only write state owned by index i.
/// The first exception thrown by any worker is rethrown after all join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace hcert
