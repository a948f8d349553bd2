#pragma once

#include <cstddef>
#include <functional>

namespace cvq {

// Worker count: CVQ_THREADS when set to a positive integer, otherwise the
// hardware concurrency (at least 1).
int worker_count();

// Runs body(i) for i in [0, n). The first exception thrown by any call is
// rethrown after all workers stop.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, int workers = 0);

} // namespace cvq
