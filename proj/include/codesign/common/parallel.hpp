#pragma once

#include <cstddef>
#include <functional>

namespace codesign {

/// Number of workers: CODESIGN_WORKERS if set, else hardware concurrency.
int worker_count();

/// Runs fn(i) for i in [0, n). Each index is independent; results must be
/// written by index so the outcome does not depend on scheduling.
/// The first exception thrown by any worker is rethrown on the caller.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn,
                  int workers = 0);

}  // namespace codesign
