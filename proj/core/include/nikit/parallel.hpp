#pragma once

#include <cstddef>
#include <functional>

namespace nikit {

/// Worker count for embarrassingly parallel loops: hardware concurrency,
/// capped by the NIKIT_THREADS environment variable when it is set.
std::size_t thread_budget();

/// Runs body(begin, end) over contiguous chunks of [0, count). Chunks run on
/// up to `threads` workers; threads == 1 runs inline. The first exception (by
/// chunk order) is rethrown after all workers join.
void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace nikit
