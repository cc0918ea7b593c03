#pragma once

#include <cstddef>
#include <functional>

namespace vrp {

// Thread count from VRP_THREADS; 0, unset or unparsable means "auto".
unsigned threads_from_env();

// 0 -> hardware concurrency (at least 1).
unsigned resolve_threads(unsigned requested) noexcept;

// Runs body(begin, end) over contiguous chunks of [0, count). Chunk bounds
// depend only on count and the resolved thread count; callers write results
// into per-index slots so the outcome is independent of scheduling.
void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace vrp
