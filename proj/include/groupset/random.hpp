#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace groupset {

// SplitMix64 finalizer; used only to derive well-separated seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Seeded generator with a portable output sequence.
//
// The engine is std::mt19937_64, whose output is fixed by the C++ standard. Bounded
// draws use rejection sampling on the raw 64-bit output instead of
// std::uniform_int_distribution, whose algorithm is implementation-defined. Stream `i`
// of seed `s` is seeded with splitmix64(splitmix64(s) ^ i), so trial i of a run does not
// depend on how trials are split across threads.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
      : engine_(splitmix64(splitmix64(seed) ^ stream)) {}

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % bound;
  }

  // Fisher-Yates: after the call, items[0..count) is a uniform random ordered sample.
  template <class T>
  void partial_shuffle(std::span<T> items, std::size_t count) {
    for (std::size_t i = 0; i < count && i + 1 < items.size(); ++i) {
      const auto j = i + static_cast<std::size_t>(below(items.size() - i));
      std::swap(items[i], items[j]);
    }
  }

  template <class T>
  void shuffle(std::span<T> items) {
    partial_shuffle(items, items.size());
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace groupset
