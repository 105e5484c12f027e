#pragma once

// Deterministic fan-out over sample indices. Work is cut into fixed chunks
// whose layout depends only on n and the chunk size; results come back in
// chunk order and are combined pairwise, so the thread count never changes
// a single bit of the output.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <type_traits>
#include <vector>

namespace chaoswork {

struct ParallelOptions {
  std::size_t threads = 0;   ///< 0 = hardware concurrency
  /// Samples per chunk; part of the reproducibility key. 0 picks
  /// clamp(ceil(n / 256), 16, 4096), which also fixes the bootstrap batches.
  std::size_t chunk = 0;

  std::size_t resolved_threads() const {
    if (threads > 0) return threads;
    return std::max<std::size_t>(1, std::thread::hardware_concurrency());
  }

  std::size_t resolved_chunk(std::size_t n) const {
    if (chunk > 0) return chunk;
    return std::clamp<std::size_t>((n + 255) / 256, 16, 4096);
  }
};

/// Calls fn(chunk_index, begin, end) for every chunk of [0, n) and returns the
/// results indexed by chunk. If any chunk throws, the exception of the lowest
/// failing chunk is rethrown after all workers stop.
template <class Fn>
auto map_chunks(std::size_t n, const ParallelOptions& opt, Fn&& fn)
    -> std::vector<std::invoke_result_t<Fn&, std::size_t, std::size_t, std::size_t>> {
  using R = std::invoke_result_t<Fn&, std::size_t, std::size_t, std::size_t>;
  const std::size_t chunk = opt.resolved_chunk(n);
  const std::size_t n_chunks = (n + chunk - 1) / chunk;
  std::vector<R> out(n_chunks);
  if (n_chunks == 0) return out;

  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::mutex err_mutex;
  std::exception_ptr first_error;
  std::size_t first_error_chunk = n_chunks;

  auto worker = [&] {
    for (;;) {
      if (stop.load(std::memory_order_relaxed)) return;
      const std::size_t c = next.fetch_add(1);
      if (c >= n_chunks) return;
      const std::size_t b = c * chunk;
      const std::size_t e = std::min(n, b + chunk);
      try {
        out[c] = fn(c, b, e);
      } catch (...) {
        std::lock_guard lock(err_mutex);
        if (c < first_error_chunk) {
          first_error_chunk = c;
          first_error = std::current_exception();
        }
        stop = true;
      }
    }
  };

  const std::size_t n_threads = std::min(opt.resolved_threads(), n_chunks);
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (std::size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);
  return out;
}

/// Pairwise (tree) combination of parts in index order.
template <class T, class Combine>
T pairwise_reduce(std::vector<T> parts, Combine&& combine) {
  if (parts.empty()) return T{};
  while (parts.size() > 1) {
    std::vector<T> next;
    next.reserve((parts.size() + 1) / 2);
    for (std::size_t i = 0; i + 1 < parts.size(); i += 2) {
      next.push_back(combine(std::move(parts[i]), std::move(parts[i + 1])));
    }
    if (parts.size() % 2 == 1) next.push_back(std::move(parts.back()));
    parts = std::move(next);
  }
  return std::move(parts.front());
}

}  // namespace chaoswork
