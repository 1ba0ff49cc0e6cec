#pragma once

#include <cstddef>
#include <functional>

namespace oligo {

/// Worker-count bound for replica-level parallelism. threads == 1 runs every
/// task inline on the calling thread, in index order (the audit mode).
struct ExecOptions {
  unsigned threads = 1;
};

/// Default worker count: hardware concurrency, at least 1.
unsigned default_threads() noexcept;

/// Calls task(i) for i in [0, n). Tasks must write only to slots they own.
/// The first exception thrown by any task is rethrown after all workers join.
void parallel_for(std::size_t n, const ExecOptions& exec, const std::function<void(std::size_t)>& task);

}  // namespace oligo
