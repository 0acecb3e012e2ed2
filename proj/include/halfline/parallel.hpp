#pragma once

#include <functional>

namespace halfline {

/// HALFLINE_NLS_THREADS when set to a positive integer, else the hardware concurrency (at least 1).
int thread_cap();

/// Runs fn(0..n-1) on up to `threads` threads. Indices are claimed in order;
/// the first exception thrown is rethrown after all workers finish.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

} // namespace halfline
