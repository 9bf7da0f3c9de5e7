#pragma once

#include <cstddef>
#include <functional>

namespace filterlab {

/// Environment variable that overrides the default worker count.
inline constexpr const char* kThreadsEnv = "FILTERLAB_THREADS";

/// Worker count used when a caller passes 0: $FILTERLAB_THREADS if set to a
/// positive integer, else the hardware concurrency (at least 1).
std::size_t default_threads();

/// Calls body(i) for every i in [0, count) on up to `threads` workers
/// (0 = default_threads()). Indices are handed out in contiguous blocks;
/// callers write results into per-index slots, which keeps outputs
/// independent of the worker count. If bodies throw, the exception from the
/// lowest failing index is rethrown after all workers join.
void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace filterlab
