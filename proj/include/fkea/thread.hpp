#pragma once

#include <cstdint>
#include <functional>

namespace fkea {

// Global worker count for library-internal parallelism. Defaults to the
// hardware concurrency; the CLI sets it from --threads / FKEA_THREADS.
void set_max_threads(int count);
int max_threads();

// Runs task(0), ..., task(count-1) on up to max_threads() workers pulling
// indices from a shared counter. Tasks must write to disjoint outputs; the
// scheduler gives no ordering guarantees, so results must not depend on
// execution order. All numeric results stay bit-identical across thread
// counts because every task computes the same values wherever it runs.
// Exceptions thrown by tasks are rethrown on the calling thread.
void parallel_for(std::int64_t count, const std::function<void(std::int64_t)>& task);

}  // namespace fkea
