#pragma once

#include <functional>

namespace rtlab {

/// Worker count used by the column/row kernels. 1 means run inline.
void set_thread_count(int n);
int thread_count();

/// Runs body(begin, end) over contiguous chunks of [0, n). Chunks are disjoint,
/// so results do not depend on the worker count as long as body only writes
/// to its own range.
void parallel_for(int n, const std::function<void(int, int)>& body);

} // namespace rtlab
