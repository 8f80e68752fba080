#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace qss {

/// Fixed partition of a slot range into shards. The partition depends only
/// on the shard size, never on the worker count, so results merged in shard
/// order are identical however many threads ran them.
struct ShardPlan {
  std::uint64_t n_slots = 0;
  std::uint64_t shard_slots = std::uint64_t{1} << 32;

  std::uint64_t shard_count() const {
    return shard_slots == 0 ? 0 : (n_slots + shard_slots - 1) / shard_slots;
  }
  std::uint64_t begin(std::uint64_t shard) const { return shard * shard_slots; }
  std::uint64_t end(std::uint64_t shard) const {
    return std::min(n_slots, (shard + 1) * shard_slots);
  }
};

/// Runs fn(shard, begin, end) for every shard on up to `threads` workers and
/// returns the results in shard order.
template <class Fn>
auto run_sharded(const ShardPlan& plan, unsigned threads, Fn&& fn) {
  using Result = decltype(fn(std::uint64_t{}, std::uint64_t{}, std::uint64_t{}));
  const std::uint64_t n = plan.shard_count();
  std::vector<Result> results(n);
  if (threads <= 1 || n <= 1) {
    for (std::uint64_t s = 0; s < n; ++s) results[s] = fn(s, plan.begin(s), plan.end(s));
    return results;
  }
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::uint64_t s = next++; s < n; s = next++) {
      try {
        results[s] = fn(s, plan.begin(s), plan.end(s));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::jthread> pool;
  const auto count = static_cast<unsigned>(std::min<std::uint64_t>(threads, n));
  pool.reserve(count);
  for (unsigned t = 0; t < count; ++t) pool.emplace_back(worker);
  pool.clear();
  if (failure) std::rethrow_exception(failure);
  return results;
}

}  // namespace qss
