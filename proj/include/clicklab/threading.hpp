#pragma once

#include <cstdlib>
#include <future>
#include <thread>
#include <vector>

namespace clicklab {

// Worker-count resolution: explicit request wins, then the CLICKLAB_THREADS
// environment variable, then the hardware count. Outputs never depend on the
// resolved value; it only controls how work is scheduled.
inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("CLICKLAB_THREADS")) {
    const int value = std::atoi(env);
    if (value > 0) return value;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Applies fn to [0, count) split into contiguous chunks, one per worker, and
// returns the per-chunk results in chunk order. fn(chunk_begin, chunk_end).
template <typename Result, typename Fn>
std::vector<Result> parallel_chunks(std::size_t count, int threads, Fn&& fn) {
  const auto workers = static_cast<std::size_t>(threads < 1 ? 1 : threads);
  std::vector<Result> results;
  if (workers <= 1 || count <= 1) {
    results.push_back(fn(std::size_t{0}, count));
    return results;
  }
  std::vector<std::future<Result>> futures;
  futures.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = count * w / workers;
    const std::size_t end = count * (w + 1) / workers;
    futures.push_back(std::async(std::launch::async, [begin, end, &fn] { return fn(begin, end); }));
  }
  results.reserve(workers);
  for (auto& f : futures) results.push_back(f.get());
  return results;
}

}  // namespace clicklab
