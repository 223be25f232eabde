#pragma once

#include <cstddef>
#include <functional>

namespace darklattice {

// DARKLATTICE_THREADS if set and positive, else the hardware concurrency.
int default_thread_count();

// Runs fn(i) for i in [0, n) on up to `threads` workers with static chunks.
// Each index is handled exactly once, so writes to per-index slots are race free.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn, int threads = 0);

}  // namespace darklattice
