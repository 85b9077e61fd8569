#pragma once

#include <cstdint>
#include <functional>

namespace ncshape {

/// Caps the number of worker threads used by parallel_for. 0 restores the
/// hardware default. Results never depend on this setting: work is split into
/// fixed chunks and each chunk is evaluated in a fixed order.
void set_max_threads(int n);
int max_threads();

/// Runs fn(begin, end) over a static partition of [0, n). Chunks are
/// contiguous and assigned deterministically; fn must not touch shared
/// mutable state outside its own range.
void parallel_for(std::int64_t n, const std::function<void(std::int64_t, std::int64_t)>& fn);

} // namespace ncshape
