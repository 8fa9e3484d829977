#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace fakenews {

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes);

std::uint64_t splitmix64(std::uint64_t x);

/// Seed for a named sub-stream, so enabling one consumer of randomness never
/// shifts the draws seen by another.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view stream);

/// Deterministic random source. Only the raw mt19937_64 output is used; the
/// distributions are implemented here so results do not depend on the
/// standard library vendor.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  Rng(std::uint64_t seed, std::string_view stream) : engine_(derive_seed(seed, stream)) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);

  bool bernoulli(double p) { return uniform() < p; }

  /// Standard normal (Box-Muller, one draw per call).
  double normal();

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::size_t j = below(i);
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace fakenews
