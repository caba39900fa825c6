#pragma once

// Portable, seedable randomness. The engine is std::mt19937_64, whose output
// sequence is fixed by the C++ standard; the distributions below are written
// out here because the standard library's are implementation-defined. Every
// dataset is therefore reproducible across compilers and platforms, and can be
// re-derived in another language from this description:
//
//   below(n):  Lemire-style rejection: draw x until x >= (2^64 - n) mod n,
//              return x mod n.
//   shuffle:   Fisher-Yates from the back, j = below(i + 1).
//   derive:    SplitMix64 finalizer over (seed + 0x9E3779B97F4A7C15 * (stream + 1)).

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace cotbench {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, n). n must be positive.
  std::size_t below(std::size_t n) {
    if (n == 0) throw std::invalid_argument("Rng::below(0)");
    const std::uint64_t bound = static_cast<std::uint64_t>(n);
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t x = engine_();
      if (x >= threshold) return static_cast<std::size_t>(x % bound);
    }
  }

  bool coin() { return (engine_() >> 63) != 0; }

  template <class T>
  const T& pick(std::span<const T> items) {
    return items[below(items.size())];
  }

  template <class T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[below(i)]);
    }
  }

  /// Independent stream seed for sub-task `stream` of a run seeded with `seed`.
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace cotbench
