#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace bmc {

//! Worker count from BMC_KERNEL_THREADS, else hardware concurrency (>= 1).
unsigned default_thread_count();

//! `requested` if positive, otherwise default_thread_count().
unsigned resolve_threads(int requested);

/// Calls fn(i) for every i in [0, count) using up to `threads` workers.
///
/// Indices are split into contiguous static chunks. Callers write results
/// to index-addressed storage, so output never depends on the worker count.
/// The first exception thrown by any fn(i) is rethrown after all workers join.
template<class Fn>
void
parallel_for(std::size_t count, unsigned threads, Fn&& fn)
{
  if (count == 0)
    return;
  const std::size_t workers = std::min<std::size_t>(std::max(1u, threads), count);
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i)
      fn(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = count * w / workers;
    const std::size_t end = count * (w + 1) / workers;
    pool.emplace_back([&, begin, end] {
      try {
        for (std::size_t i = begin; i < end; ++i)
          fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure)
          failure = std::current_exception();
      }
    });
  }
  pool.clear();
  if (failure)
    std::rethrow_exception(failure);
}

/// Sum of term(0) + ... + term(n-1), combined pairwise over blocks of 64 so
/// the rounding pattern is fixed by n alone.
template<class Term>
double
pairwise_sum(std::size_t begin, std::size_t end, const Term& term)
{
  constexpr std::size_t block = 64;
  if (end - begin <= block) {
    double s = 0.0;
    for (std::size_t i = begin; i < end; ++i)
      s += term(i);
    return s;
  }
  const std::size_t mid = begin + (end - begin) / 2;
  return pairwise_sum(begin, mid, term) + pairwise_sum(mid, end, term);
}

template<class Term>
double
pairwise_sum(std::size_t n, const Term& term)
{
  return pairwise_sum(0, n, term);
}

} // namespace bmc
