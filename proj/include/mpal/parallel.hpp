#pragma once
// Deterministic fan-out over independent trials. Results are keyed by trial
// index, so the worker count never influences the output; shared state is
// limited to the claim counter and the per-index result slots.

#include <atomic>
#include <exception>
#include <thread>
#include <vector>

#include "mpal/common.hpp"

namespace mpal {

// Runs fn(i) for every i in [0, count) on up to `workers` threads and returns
// the results in index order. If any invocation throws, the exception from
// the lowest failing index is rethrown after all workers finish. Result must
// be default-constructible and movable.
template <typename Result, typename Fn>
std::vector<Result> run_indexed(std::size_t count, int workers, Fn fn) {
  if (workers < 1) {
    throw UsageError("run_indexed: workers must be positive, got " + std::to_string(workers));
  }
  std::vector<Result> results(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};

  auto drain = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        results[i] = fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };

  const std::size_t spawn =
      std::min<std::size_t>(static_cast<std::size_t>(workers), count == 0 ? 0 : count);
  if (spawn <= 1) {
    drain();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(spawn);
    for (std::size_t w = 0; w < spawn; ++w) pool.emplace_back(drain);
    for (std::thread& t : pool) t.join();
  }

  for (std::size_t i = 0; i < count; ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
  }
  return results;
}

}  // namespace mpal
