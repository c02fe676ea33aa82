#pragma once

#include <cstddef>
#include <functional>

namespace monokan {

/// Worker cap: MONOKAN_THREADS when set (minimum 1), else the hardware
/// concurrency.
std::size_t thread_budget();

std::size_t chunk_count(std::size_t count, std::size_t chunk_size);

/// Runs fn(begin, end, chunk_index) over fixed-size chunks of [0, count).
/// Chunk boundaries depend only on count and chunk_size, never on the number
/// of workers, so a reduction done in chunk-index order gives bit-identical
/// results for any MONOKAN_THREADS setting.
void for_each_chunk(std::size_t count, std::size_t chunk_size,
                    const std::function<void(std::size_t, std::size_t, std::size_t)>& fn);

}  // namespace monokan
