#pragma once

#include <functional>

namespace mimo {

//! Worker count: explicit request, else MIMO_WORKERS, else hardware threads.
int resolve_workers(int requested);

//! Runs task(0..n_tasks-1) on up to `workers` threads. Tasks must write to
//! disjoint slots; callers aggregate in task order afterwards, which keeps
//! results independent of the scheduling.
void parallel_for(int n_tasks, int workers, const std::function<void(int)>& task);

}  // namespace mimo
