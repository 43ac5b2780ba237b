#pragma once

#include <cstddef>
#include <functional>

namespace uilab {

// Number of worker threads: value of UILAB_THREADS, or 1 when unset/invalid.
int thread_budget();

// Runs fn(i) for i in [0, n). Work is split into contiguous chunks, one per
// thread; each item writes only its own output slot, so results are identical
// to the sequential loop for any thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace uilab
