#pragma once

#include <cstdint>

namespace tgl {

/// Counter-based 64-bit generator.
///
/// Each draw is a pure function of (seed, stream, counter): the output is the
/// SplitMix64 finalizer applied to a Weyl sequence keyed by the seed and the
/// stream. Streams are derived with `split`, so trial `t` of a study seeded
/// with `s` always sees the same numbers regardless of how many other trials
/// ran before it or on which thread.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) noexcept;

  std::uint64_t next_u64() noexcept;

  /// Uniform on the open interval (0, 1); never returns 0 or 1.
  double uniform_open() noexcept;

  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) noexcept;

  /// Generator for an independent child stream (e.g. one per trial index).
  CounterRng split(std::uint64_t child) const noexcept;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }
  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed for trial `trial` of sample size `n` in a study with `base_seed`.
std::uint64_t derive_trial_seed(std::uint64_t base_seed, std::uint64_t n, std::uint64_t trial) noexcept;

}  // namespace tgl
