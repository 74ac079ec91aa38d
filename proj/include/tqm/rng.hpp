#pragma once

#include <cstdint>

namespace tqm {

// splitmix64 finalizer; also used to derive sub-stream seeds.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic seed for a named sub-run (curve point, CHSH setting, ...).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t salt) {
  return mix64(master ^ mix64(salt));
}

class UniformStream {
public:
  virtual ~UniformStream() = default;
  virtual double next() = 0;  // uniform in [0, 1)
};

// Counter-based uniform stream keyed by (master seed, trial index). A trial's
// draws depend only on that key, so disjoint trials can run on any number of
// threads and merge into bit-identical results.
class TrialRng final : public UniformStream {
public:
  TrialRng(std::uint64_t master_seed, std::uint64_t trial_index)
      : state_(mix64(master_seed ^ mix64(trial_index ^ 0x6a09e667f3bcc909ULL))) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // 53-bit mantissa; never returns 1.0.
  double next() override {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

private:
  std::uint64_t state_;
};

}  // namespace tqm
