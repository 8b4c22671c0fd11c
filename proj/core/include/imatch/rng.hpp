#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace imatch::rng {

// SplitMix64 finalizer. Used as the counter-based generator for latent draws
// and for deriving independent seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t combine(std::uint64_t a, std::uint64_t b) noexcept {
  return splitmix64(a ^ splitmix64(b + 0x632be59bd9b4e019ULL));
}

constexpr std::uint64_t combine(std::uint64_t a, std::uint64_t b, std::uint64_t c) noexcept {
  return combine(combine(a, b), c);
}

// Uniform double in [0, 1) from the top 53 bits.
constexpr double unit_from_bits(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Sequential stream for structural randomness (plan sampling, scenario tiers).
// Bounded draws do not use <random> distributions so results are identical
// across standard library implementations.
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  std::uint64_t next() { return engine_(); }

  double unit() { return unit_from_bits(engine_()); }

  // Uniform integer in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound);

  // Uniform k-subset of [0, population) without replacement, in draw order.
  std::vector<std::uint32_t> sample_without_replacement(std::uint32_t population, std::uint32_t k);

 private:
  std::mt19937_64 engine_;
};

}  // namespace imatch::rng
