#pragma once

#include <cstddef>
#include <functional>

namespace voltide::par {

/// Runs fn(i) for i in [0, n) on up to `workers` threads (0 = hardware
/// concurrency). Work items must be independent; results keyed by index stay
/// deterministic at any worker count. Exceptions propagate to the caller.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn,
                  std::size_t workers = 0);

}  // namespace voltide::par
