#pragma once

#include <cstddef>
#include <functional>

namespace lsr {

/// 0 means all hardware threads.
unsigned resolve_workers(unsigned requested) noexcept;

/// Runs fn(item, worker) for item in [0, n) on up to `workers` threads with
/// dynamic scheduling; `worker` is a dense index usable for per-thread
/// scratch. The first exception thrown by any task is rethrown here.
void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t, unsigned)>& fn);

/// Number of threads parallel_for will actually start for n items.
unsigned effective_workers(std::size_t n, unsigned workers) noexcept;

}  // namespace lsr
