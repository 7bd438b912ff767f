#pragma once

#include <functional>

namespace contact {

// Worker count for replica-level parallelism; the CONTACT_SHAPE_THREADS
// environment variable caps it. requested == 0 means "use the cap".
int worker_count(int requested = 0);

// Runs fn(0..n-1) across workers. Callers own determinism: results must be
// written to per-index slots and reduced in index order afterwards.
void parallel_for(long n, const std::function<void(long)>& fn, int threads = 0);

}  // namespace contact
