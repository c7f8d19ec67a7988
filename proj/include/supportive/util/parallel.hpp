#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace supportive {

/// Runs body(chunk, begin, end) over contiguous chunks of [0, n) on up to `jobs`
/// threads. Chunk boundaries depend only on n and chunk_size, never on jobs,
/// so per-chunk results can be merged deterministically. The first exception
/// by chunk order is rethrown.
template <class Body>
void parallel_chunks(std::size_t n, std::size_t chunk_size, std::size_t jobs, Body&& body) {
  if (n == 0) return;
  chunk_size = std::max<std::size_t>(chunk_size, 1);
  const std::size_t chunks = (n + chunk_size - 1) / chunk_size;
  jobs = std::clamp<std::size_t>(jobs, 1, chunks);

  std::vector<std::exception_ptr> errors(chunks);
  auto run_chunk = [&](std::size_t c) {
    try {
      body(c, c * chunk_size, std::min(n, (c + 1) * chunk_size));
    } catch (...) {
      errors[c] = std::current_exception();
    }
  };

  if (jobs == 1) {
    for (std::size_t c = 0; c < chunks; ++c) run_chunk(c);
  } else {
    std::vector<std::thread> workers;
    workers.reserve(jobs);
    for (std::size_t w = 0; w < jobs; ++w) {
      workers.emplace_back([&, w] {
        for (std::size_t c = w; c < chunks; c += jobs) run_chunk(c);
      });
    }
    for (auto& t : workers) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace supportive
