#pragma once

#include <cstddef>
#include <functional>

namespace waveshape {

/// Worker cap: WAVESHAPE_THREADS if set and positive, else hardware concurrency.
unsigned thread_count();

/// Runs body(i) for i in [0, n) across up to thread_count() workers using
/// contiguous chunks. Each index is visited exactly once, so bodies that only
/// write slot i produce results independent of the split.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace waveshape
