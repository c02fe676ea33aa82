#include "monokan/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <thread>
#include <vector>

namespace monokan {

std::size_t thread_budget() {
  if (const char* env = std::getenv("MONOKAN_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<std::size_t>(v);
    return 1;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

std::size_t chunk_count(std::size_t count, std::size_t chunk_size) {
  if (chunk_size == 0) throw std::invalid_argument("chunk_size must be positive");
  return (count + chunk_size - 1) / chunk_size;
}

void for_each_chunk(std::size_t count, std::size_t chunk_size,
                    const std::function<void(std::size_t, std::size_t, std::size_t)>& fn) {
  const std::size_t chunks = chunk_count(count, chunk_size);
  if (chunks == 0) return;
  const std::size_t workers = std::min(thread_budget(), chunks);
  if (workers <= 1) {
    for (std::size_t c = 0; c < chunks; ++c)
      fn(c * chunk_size, std::min(count, (c + 1) * chunk_size), c);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto run = [&] {
    for (;;) {
      const std::size_t c = next.fetch_add(1);
      if (c >= chunks) return;
      fn(c * chunk_size, std::min(count, (c + 1) * chunk_size), c);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(run);
  run();
  for (std::thread& t : pool) t.join();
}

}  // namespace monokan
