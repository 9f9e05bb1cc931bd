#pragma once

#include <cstddef>
#include <functional>

namespace fiberkit {

/// Process-wide worker count used by grid sweeps. Defaults to the value of
/// FIBERKIT_THREADS when set, otherwise 1.
int thread_count();
void set_thread_count(int n);

/// Calls body(i) for every i in [0, n). Each index is visited exactly once;
/// callers write only to slot i of preallocated storage, so results do not
/// depend on the worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace fiberkit
