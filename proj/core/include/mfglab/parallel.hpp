#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace mfg {

/// Worker cap: MFGLAB_THREADS when set (minimum 1), hardware concurrency
/// otherwise. Read once per process.
std::size_t thread_budget();

/// Runs fn(0..n-1) on up to thread_budget() workers. Results keep index
/// order, so reductions over them are deterministic regardless of the
/// worker count. Exceptions from tasks are rethrown on the caller.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

} // namespace mfg
