#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace depdisc {

/// Deterministic random source. mt19937_64 output is fixed by the standard;
/// the bounded draw and shuffle are implemented here because the standard
/// library versions are implementation-defined.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t next() { return engine_(); }

  /// Uniform draw from [0, bound) via rejection sampling. bound > 0.
  uint64_t next_below(uint64_t bound) {
    const uint64_t limit = ~uint64_t{0} - (~uint64_t{0} % bound);
    uint64_t v = engine_();
    while (v >= limit) v = engine_();
    return v % bound;
  }

  /// Fisher-Yates shuffle, stable across platforms.
  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (size_t i = items.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(next_below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

  /// Identity-seeded permutation of [0, n).
  std::vector<uint32_t> permutation(uint32_t n) {
    std::vector<uint32_t> p(n);
    for (uint32_t i = 0; i < n; ++i) p[i] = i;
    shuffle(p);
    return p;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace depdisc
