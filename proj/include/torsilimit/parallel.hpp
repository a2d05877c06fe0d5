#pragma once

#include <cstddef>
#include <functional>

namespace torsilimit {

/// Worker count: min(hardware_concurrency, TORSILIMIT_THREADS when set).
unsigned thread_budget();

/// Runs fn(i) for i in [0, n). Work items must be independent; results should
/// be written to preallocated slots so the outcome is schedule-independent.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace torsilimit
