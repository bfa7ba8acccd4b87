#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace access_sudoku {

/// Seeded source used by puzzle generation.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. Bounded draws and shuffles are implemented here instead of using
/// std::uniform_int_distribution / std::shuffle, whose algorithms vary between
/// standard libraries. Together this makes puzzles reproducible everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, bound), by rejection of the biased tail.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = bound * (UINT64_MAX / bound);
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % bound;
  }

  /// Fisher-Yates, swapping from the back.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Seed for the counter-th derived stream of `seed` (counter >= 1).
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t counter) {
  return mix64(seed + counter * 0x9E3779B97F4A7C15ULL);
}

}  // namespace access_sudoku
