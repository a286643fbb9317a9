#pragma once

#include <cstddef>
#include <functional>

namespace schr {

// Calls body(i) once for every i in [0, n) using up to `threads` workers
// (0 means hardware concurrency). Indices are split into contiguous blocks.
// Bodies must only write storage owned by their index, which keeps results
// independent of the thread count. The first exception thrown is rethrown.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body);

unsigned resolve_threads(unsigned requested);

}  // namespace schr
