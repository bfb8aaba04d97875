#pragma once

#include <functional>

#include "kinvlap/types.hpp"

namespace kinvlap {

/// Number of worker threads: hardware concurrency, capped by the
/// KINVLAP_THREADS environment variable when set.
int thread_count();

/// Splits [0, n) into contiguous chunks and runs chunk_fn(begin, end) on each,
/// one chunk per worker. Chunk boundaries depend only on n and the thread
/// count; callers must write to disjoint output locations.
void parallel_for(Index n, const std::function<void(Index, Index)>& chunk_fn);

}  // namespace kinvlap
