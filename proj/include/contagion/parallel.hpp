#pragma once

#include <cstddef>
#include <functional>

namespace contagion {

/// Runs fn(i) for i in [0, n) on the given number of workers (0 = hardware
/// concurrency). Work items must be independent; results written to
/// pre-assigned slots stay identical for any worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn,
                  int workers = 0);

}  // namespace contagion
