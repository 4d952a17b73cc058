#pragma once

#include <cstddef>
#include <functional>

namespace lambda_lab {

/// Number of worker threads used by parallel loops. Defaults to the
/// hardware concurrency, capped by the LAMBDA_LAB_THREADS environment
/// variable; set_worker_count overrides both (0 restores the default).
std::size_t worker_count();
void set_worker_count(std::size_t n);

/// Runs task(i) for i in [0, n_tasks). Tasks must write only to their own
/// output slots; callers reduce in index order so that results are identical
/// for every worker count. The exception of the lowest failing task is
/// rethrown.
void parallel_for(std::size_t n_tasks, const std::function<void(std::size_t)>& task);

}  // namespace lambda_lab
