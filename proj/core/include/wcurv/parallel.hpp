#ifndef WCURV_PARALLEL_HPP
#define WCURV_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace wcurv {

// Worker count: min(hardware, 8), capped by the WCURVLAB_THREADS
// environment variable. Always >= 1.
int thread_count();

// Runs fn(begin, end) over a partition of [0, count). Each range is
// disjoint, so writes to per-index slots need no synchronization and the
// result is identical to the serial execution. Reductions do not belong
// here; keep them serial for fixed-order determinism.
void parallel_for(std::size_t count,
                  const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace wcurv

#endif
