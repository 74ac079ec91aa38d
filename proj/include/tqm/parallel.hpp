#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <thread>
#include <vector>

namespace tqm {

// 0 means one thread per hardware core.
inline unsigned resolve_thread_count(unsigned requested) {
  if (requested != 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1u : hw;
}

// TQM_THREADS environment cap; unset, empty, or unparsable means auto.
inline unsigned thread_count_from_env() {
  const char* raw = std::getenv("TQM_THREADS");
  if (raw == nullptr || *raw == '\0') return resolve_thread_count(0);
  char* end = nullptr;
  const unsigned long v = std::strtoul(raw, &end, 10);
  if (end == raw || *end != '\0') return resolve_thread_count(0);
  return resolve_thread_count(static_cast<unsigned>(v));
}

// Runs per_trial(i) for i in [0, trials) over static chunks and returns the
// results ordered by trial index. per_trial must derive all randomness from
// the index alone; it is invoked concurrently and must not throw.
template <typename T, typename Fn>
std::vector<T> run_trials(std::uint64_t trials, unsigned threads, Fn&& per_trial) {
  std::vector<T> results(trials);
  threads = resolve_thread_count(threads);
  if (threads <= 1 || trials < 2) {
    for (std::uint64_t i = 0; i < trials; ++i) results[i] = per_trial(i);
    return results;
  }
  if (threads > trials) threads = static_cast<unsigned>(trials);
  const std::uint64_t chunk = (trials + threads - 1) / threads;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned w = 0; w < threads; ++w) {
    const std::uint64_t begin = static_cast<std::uint64_t>(w) * chunk;
    const std::uint64_t end = std::min(trials, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&results, &per_trial, begin, end] {
      for (std::uint64_t i = begin; i < end; ++i) results[i] = per_trial(i);
    });
  }
  for (auto& t : pool) t.join();
  return results;
}

}  // namespace tqm
