#pragma once

#include <cstddef>
#include <functional>

namespace anchorfit {

/// Environment variable overriding the worker count.
inline constexpr const char* kThreadsEnv = "ANCHORFIT_THREADS";

/// Worker count: $ANCHORFIT_THREADS when set to a positive integer, else the
/// hardware concurrency (at least 1).
unsigned worker_count();

/// Runs body(i) for i in [0, n) over contiguous chunks. Callers write results
/// into per-index slots, so the outcome does not depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                  unsigned threads = 0);

}  // namespace anchorfit
