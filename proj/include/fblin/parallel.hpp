#pragma once

#include <functional>

namespace fblin {

// Worker cap: FBLIN_THREADS if set and positive, else hardware concurrency.
int worker_count();

// Runs body(i) for i in [0, n).  Iterations must be independent; results are
// identical to a sequential loop because each index writes its own output.
void parallel_for(int n, const std::function<void(int)>& body);

}  // namespace fblin
