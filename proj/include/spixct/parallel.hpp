#pragma once

#include <functional>

namespace spixct {

/// Worker threads used by the operators (default: hardware concurrency).
/// All parallel kernels either write disjoint outputs or reduce fixed-size
/// block partials in block order, so results are bit-identical for any
/// thread count.
int max_threads();
void set_max_threads(int count);

/// Runs fn(lo, hi) over a contiguous partition of [begin, end).
void parallel_for_blocks(int begin, int end, const std::function<void(int, int)>& fn);

}  // namespace spixct
