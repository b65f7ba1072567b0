#pragma once

#include <cstddef>
#include <functional>

namespace rectnet {

// Runs fn(i) for i in [0, n) on `threads` workers (0 = hardware default).
// Work items must be independent; callers reduce results in index order so
// outcomes are independent of scheduling.
void parallel_for(size_t n, const std::function<void(size_t)>& fn, unsigned threads = 0);

unsigned default_threads();

}  // namespace rectnet
