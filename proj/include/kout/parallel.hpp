#pragma once

#include <atomic>
#include <cstdint>
#include <thread>
#include <vector>

namespace kout {

inline unsigned effective_threads(unsigned requested) {
  if (requested > 0) return requested;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

// Deterministic chunked map: the body fills partials[chunk] for replicate
// range [chunk*chunk_size, end). Partials are indexed by chunk, so any
// reduction performed in index order yields the same result for every thread
// count and schedule. Chunk sizes are fixed constants at call sites for the
// same reason.
template <class Partial, class Body>
std::vector<Partial> run_chunked(std::uint64_t total, std::uint64_t chunk_size, unsigned threads,
                                 Body&& body) {
  std::uint64_t n_chunks = chunk_size == 0 ? 0 : (total + chunk_size - 1) / chunk_size;
  std::vector<Partial> partials(n_chunks);
  if (n_chunks == 0) return partials;
  std::atomic<std::uint64_t> next{0};
  auto worker = [&]() {
    for (;;) {
      std::uint64_t c = next.fetch_add(1);
      if (c >= n_chunks) return;
      std::uint64_t begin = c * chunk_size;
      std::uint64_t end = std::min(total, begin + chunk_size);
      body(c, begin, end, partials[c]);
    }
  };
  unsigned t = effective_threads(threads);
  if (t <= 1 || n_chunks <= 1) {
    worker();
    return partials;
  }
  std::vector<std::thread> pool;
  pool.reserve(t - 1);
  for (unsigned i = 0; i + 1 < t; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  return partials;
}

}  // namespace kout
