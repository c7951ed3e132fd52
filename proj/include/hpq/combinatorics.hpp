#pragma once

#include <cstdint>
#include <cstddef>
#include <vector>

namespace hpq {

inline std::uint64_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  std::uint64_t r = 1;
  for (std::size_t i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
  return r;
}

/// k-combination of [0, n) with lexicographic rank r (combinatorial number
/// system). Lets support enumerations run as flat parallel loops with a
/// deterministic index order.
inline std::vector<std::size_t> unrank_combination(std::size_t n, std::size_t k,
                                                   std::uint64_t r) {
  std::vector<std::size_t> comb(k);
  std::size_t next = 0;
  for (std::size_t pos = 0; pos < k; ++pos) {
    for (std::size_t v = next;; ++v) {
      const std::uint64_t block = binomial(n - v - 1, k - pos - 1);
      if (r < block) {
        comb[pos] = v;
        next = v + 1;
        break;
      }
      r -= block;
    }
  }
  return comb;
}

}  // namespace hpq
