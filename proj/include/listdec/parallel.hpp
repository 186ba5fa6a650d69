#pragma once

// Deterministic parallel map-reduce over trial indices.
//
// Trials are cut into fixed-size chunks whose boundaries depend only on the
// trial count. Each chunk is reduced serially in index order, and chunk
// results are merged in chunk order after all workers finish. The result is
// therefore bit-identical for any worker count.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace listdec {

inline constexpr std::uint64_t kReduceChunk = 1024;

inline unsigned resolve_workers(unsigned requested) {
  if (requested != 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

/// `make()` builds an empty accumulator, `body(acc, i)` folds trial i into it,
/// `merge(into, from)` combines two accumulators.
template <class Make, class Body, class Merge>
auto chunked_reduce(std::uint64_t count, unsigned workers, Make make, Body body, Merge merge) {
  using Acc = decltype(make());
  const std::uint64_t nchunks = (count + kReduceChunk - 1) / kReduceChunk;
  std::vector<Acc> partial;
  partial.reserve(nchunks);
  for (std::uint64_t c = 0; c < nchunks; ++c) partial.push_back(make());

  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::uint64_t c = next.fetch_add(1);
      if (c >= nchunks) return;
      try {
        const std::uint64_t lo = c * kReduceChunk;
        const std::uint64_t hi = std::min(count, lo + kReduceChunk);
        for (std::uint64_t i = lo; i < hi; ++i) body(partial[c], i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(nchunks);
        return;
      }
    }
  };

  const unsigned n = std::max(1u, std::min<unsigned>(resolve_workers(workers),
                                                     static_cast<unsigned>(std::max<std::uint64_t>(nchunks, 1))));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(n);
    for (unsigned w = 0; w < n; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  Acc total = make();
  for (auto& p : partial) merge(total, p);
  return total;
}

}  // namespace listdec
