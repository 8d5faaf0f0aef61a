#pragma once

#include <cstddef>
#include <functional>

namespace scapegeom {

/// Worker count from SCAPEGEOM_THREADS (0 or unset = hardware concurrency).
unsigned thread_count();

/// Runs body(begin, end, worker) over contiguous chunks of [0, n). Chunk boundaries depend only
/// on n and the worker count; callers must combine results in a way that ignores chunking.
void parallel_chunks(size_t n, const std::function<void(size_t, size_t, unsigned)>& body,
                     unsigned max_workers = 0);

}  // namespace scapegeom
