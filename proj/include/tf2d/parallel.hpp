#pragma once

#include <cstddef>
#include <functional>

namespace tf2d {

/// Worker count: TF2D_THREADS if set and positive, else hardware concurrency.
std::size_t worker_count();

/// Calls body(i) for i in [0, n) on up to worker_count() threads. Each index
/// is processed exactly once; results must be written to per-index slots.
/// The first exception thrown by any body is rethrown after all workers stop.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace tf2d
