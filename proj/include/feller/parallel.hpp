#pragma once

#include <cstddef>
#include <functional>

namespace feller {

/// Global worker budget for data-parallel loops (set from the CLI --threads flag).
/// 0 means "use hardware concurrency".
void set_thread_budget(unsigned n);
unsigned thread_budget();

/// Runs fn(i) for i in [0, n). Work is split into contiguous blocks across
/// workers; fn must only write to per-index state so that results do not
/// depend on the partitioning.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace feller
