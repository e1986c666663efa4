#pragma once

#include <cstddef>
#include <functional>

namespace geosplit {

/// Upper bound on worker threads used inside the library. 0 means "hardware
/// concurrency". Initialised from GEOSPLIT_THREADS when set.
void set_max_threads(std::size_t n);
std::size_t max_threads();

/// Runs fn(begin, end) over contiguous chunks of [0, n). Chunk boundaries depend
/// only on n and the thread cap; callers write results into per-index slots so the
/// output never depends on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace geosplit
