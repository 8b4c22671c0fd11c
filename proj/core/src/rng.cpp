#include "imatch/rng.hpp"

#include <limits>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

namespace imatch::rng {

std::uint64_t Stream::below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("Stream::below: bound must be positive");
  // Rejection sampling on the largest multiple of bound.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % bound;
}

std::vector<std::uint32_t> Stream::sample_without_replacement(std::uint32_t population,
                                                              std::uint32_t k) {
  if (k > population) throw std::invalid_argument("sample_without_replacement: k > population");
  std::vector<std::uint32_t> out;
  out.reserve(k);
  if (static_cast<std::uint64_t>(k) * 4 >= population) {
    std::vector<std::uint32_t> pool(population);
    std::iota(pool.begin(), pool.end(), 0u);
    for (std::uint32_t i = 0; i < k; ++i) {
      const auto j = i + static_cast<std::uint32_t>(below(population - i));
      std::swap(pool[i], pool[j]);
      out.push_back(pool[i]);
    }
    return out;
  }
  // Sparse partial Fisher-Yates: same draw sequence as the dense branch.
  std::unordered_map<std::uint32_t, std::uint32_t> swapped;
  auto at = [&](std::uint32_t idx) {
    auto it = swapped.find(idx);
    return it == swapped.end() ? idx : it->second;
  };
  for (std::uint32_t i = 0; i < k; ++i) {
    const auto j = i + static_cast<std::uint32_t>(below(population - i));
    const auto vi = at(i);
    const auto vj = at(j);
    swapped[j] = vi;
    swapped[i] = vj;
    out.push_back(vj);
  }
  return out;
}

}  // namespace imatch::rng
