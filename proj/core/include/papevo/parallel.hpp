#pragma once

#include <cstddef>
#include <functional>

namespace papevo {

/// Worker count: hardware concurrency capped by PAP_EVOLVE_THREADS.
int worker_count();

/// Runs body(i) for i in [0, count) on static contiguous chunks.
/// Each index is processed exactly once, so results written per index are
/// independent of the worker count.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace papevo
