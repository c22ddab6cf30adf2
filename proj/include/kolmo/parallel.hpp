#pragma once

#include <cstddef>
#include <functional>

namespace kolmo {

/// 0 means "all hardware threads".
unsigned resolve_workers(unsigned requested) noexcept;

/// Runs body(begin, end) over contiguous index blocks on up to `workers`
/// threads. Blocks are disjoint, so bodies that write result[i] for their own
/// indices produce schedule-independent output. The first exception thrown by
/// any block is rethrown on the calling thread.
void parallel_for(std::size_t count, unsigned workers,
                  const std::function<void(std::size_t begin, std::size_t end)>& body);

}  // namespace kolmo
