#pragma once

#include <cstddef>
#include <functional>

namespace stirap {

/// Worker-thread cap: hardware concurrency, optionally limited by the
/// STIRAP_SIM_THREADS environment variable. Always >= 1.
int max_worker_threads();

/// Runs body(i) for i in [0, n) on up to n_threads workers (0 = use
/// max_worker_threads()). Each index is processed exactly once; callers get
/// deterministic results by writing to per-index slots and reducing serially
/// afterwards. Exceptions from workers are rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                  int n_threads = 0);

}  // namespace stirap
