#pragma once

#include <cstddef>
#include <functional>

namespace maintminer {

/// Worker cap: MAINTMINER_THREADS if set and positive, else hardware
/// concurrency (at least 1).
std::size_t thread_budget();

/// Runs fn(i) for i in [0, n) on up to thread_budget() threads. Results must
/// be written to per-index slots so the outcome is independent of scheduling.
/// The first exception thrown by any task is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace maintminer
