#pragma once
// Minimal fork-join helper. Worker count comes from ADSEC_THREADS (default:
// hardware concurrency), overridable per process with set_worker_count.

#include <cstddef>
#include <functional>

namespace adsec {

std::size_t worker_count();
void set_worker_count(std::size_t n);  // 0 restores the environment default

// Runs f(i) for i in [0, n). Results must be written to disjoint slots.
// The first exception thrown by any worker is rethrown on the caller.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& f);

}  // namespace adsec
