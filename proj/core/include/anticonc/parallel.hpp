#pragma once

#include <cstddef>
#include <functional>

namespace anticonc {

/// Worker count: hardware concurrency, capped by the ANTICONC_THREADS
/// environment variable when it holds a positive integer.
std::size_t worker_count();

/// Runs task(i) for i in [0, count). Tasks must write only to their own
/// output slot; callers reduce in index order, so results do not depend on
/// scheduling.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& task);

}  // namespace anticonc
