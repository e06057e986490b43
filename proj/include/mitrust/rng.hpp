#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace mitrust {

// Deterministic randomness helpers. std::uniform_int_distribution is
// implementation-defined, so sessions shuffled with it would not replay
// across standard libraries; these helpers are fully specified.

// FNV-1a 64-bit hash.
inline std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Unbiased draw from [0, bound) via rejection sampling. bound must be > 0.
inline std::uint64_t bounded_uint(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t threshold = (0 - bound) % bound;  // 2^64 mod bound
  for (;;) {
    const std::uint64_t r = rng();
    if (r >= threshold) return r % bound;
  }
}

// Uniform integer on the inclusive range [0, max_value].
inline std::uint64_t uniform_inclusive(std::mt19937_64& rng,
                                       std::uint64_t max_value) {
  if (max_value == UINT64_MAX) return rng();
  return bounded_uint(rng, max_value + 1);
}

// Seeded Fisher-Yates shuffle.
template <typename T>
void seeded_shuffle(std::vector<T>& items, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (std::size_t i = items.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(bounded_uint(rng, i));
    using std::swap;
    swap(items[i - 1], items[j]);
  }
}

}  // namespace mitrust
