#pragma once

#include <functional>

#include "dgl/types.hpp"

namespace dgl {

// Worker count: DGL_THREADS when set (>=1), else hardware concurrency.
int max_threads();

// Static block partition of [0, n) across threads. Bodies must write to
// disjoint slots; outputs are then independent of the schedule.
void parallel_for(Index n, const std::function<void(Index)>& body,
                  int threads = 0);

}  // namespace dgl
