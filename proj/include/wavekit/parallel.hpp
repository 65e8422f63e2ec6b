#pragma once

#include <cstddef>
#include <functional>

namespace wavekit {

/// Worker count: explicit override if set, else WAVEKIT_THREADS, else the
/// hardware concurrency.
std::size_t worker_count();
void set_worker_count(std::size_t n);  ///< 0 restores the default lookup

/// Runs body(i) for i in [0, n). Each index is processed exactly once; the
/// caller owns any reduction, so results do not depend on the worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace wavekit
