#include "tgl/rng.hpp"

#include <cmath>

namespace tgl {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += kGolden;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
    : seed_(seed), stream_(stream), key_(splitmix64(seed ^ splitmix64(stream + 0x632BE59BD9B4E019ULL))) {}

std::uint64_t CounterRng::next_u64() noexcept {
  const std::uint64_t c = counter_++;
  return splitmix64(key_ + c * kGolden);
}

double CounterRng::uniform_open() noexcept {
  // 53 random bits, shifted by half an ulp so both endpoints are excluded.
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::uniform(double lo, double hi) noexcept {
  const double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  const double x = lo + (hi - lo) * u;
  return x < hi ? x : std::nextafter(hi, lo);
}

CounterRng CounterRng::split(std::uint64_t child) const noexcept {
  return CounterRng(seed_, splitmix64(stream_ ^ splitmix64(child + 1)));
}

std::uint64_t derive_trial_seed(std::uint64_t base_seed, std::uint64_t n, std::uint64_t trial) noexcept {
  return splitmix64(splitmix64(base_seed ^ splitmix64(n)) + trial);
}

}  // namespace tgl
