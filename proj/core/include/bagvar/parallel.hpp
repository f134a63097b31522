#pragma once

#include <cstddef>
#include <functional>

namespace bagvar {

/// Worker count used by parallel_for. Reads BAGVAR_THREADS when set,
/// otherwise std::thread::hardware_concurrency().
std::size_t thread_count();

/// Overrides the worker count for the current process (0 restores the default).
void set_thread_count(std::size_t threads);

/// Runs body(i) for i in [0, count). Indices are split into contiguous
/// chunks; the call blocks until all chunks finish and rethrows the
/// exception from the lowest failing index. Nested calls run serially.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace bagvar
