#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace dimbench {

/// Seeded pseudo-random stream with a fixed, portable derivation of every draw.
///
/// Raw bits come from std::mt19937_64, whose output sequence is fixed by the
/// C++ standard. Draws are derived without the implementation-defined std
/// distributions:
///   uniform()  = (bits >> 11) * 2^-53, in [0, 1)
///   gaussian() = Box-Muller on two uniforms u1, u2 with u1' = 1 - u1:
///                r = sqrt(-2 ln u1'), z0 = r cos(2 pi u2), z1 = r sin(2 pi u2);
///                z0 is returned first, z1 is held for the next call.
///   below(m)   = rejection sampling on 64-bit draws, unbiased in [0, m)
///   shuffle    = Fisher-Yates from the back, swapping i with below(i + 1)
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next_u64() { return engine_(); }
  double uniform();
  double gaussian();
  double gaussian(double mean, double stddev) { return mean + stddev * gaussian(); }
  std::uint64_t below(std::uint64_t bound);

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      using std::swap;
      swap(items[i - 1], items[j]);
    }
  }
  template <typename T>
  void shuffle(std::vector<T>& items) {
    shuffle(std::span<T>(items));
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// 64-bit FNV-1a of a byte string.
std::uint64_t fnv1a64(std::string_view text) noexcept;

/// Seed for one independent stream, derived from a base seed, a string tag
/// and an integer index. Independent of any other tag, so dropping one
/// dataset from a run does not shift the streams of the others.
std::uint64_t derive_seed(std::uint64_t base, std::string_view tag, std::uint64_t index) noexcept;

}  // namespace dimbench
