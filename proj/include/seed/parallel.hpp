#pragma once

#include "seed/types.hpp"

#include <functional>

namespace seed {

/// Worker-thread cap for internal parallelism. 0 restores the hardware default.
void set_max_threads(unsigned n);
unsigned max_threads();

/// Runs fn over [0, n) split into contiguous chunks, one per worker. Chunk
/// boundaries depend only on n and the configured thread count, so results
/// that are written to disjoint slots are identical for a fixed thread count.
/// Nested calls run serially.
void parallel_for(Index n, const std::function<void(Index, Index)>& fn);

}  // namespace seed
