#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace confik {

/// Seedable generator with a portable output sequence.
///
/// The engine is std::mt19937_64, whose raw output the C++ standard pins
/// down exactly. The standard distributions are not portable, so bounded
/// draws use rejection sampling on the raw 64-bit output instead.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);

  /// True with probability num/den.
  bool chance(std::uint64_t num, std::uint64_t den) { return below(den) < num; }

  template <class T> const T &pick(const std::vector<T> &items) {
    return items[static_cast<std::size_t>(below(items.size()))];
  }

private:
  std::mt19937_64 engine_;
};

/// SplitMix64 finaliser applied to seed + stream: independent per-run seeds
/// from one user seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

} // namespace confik
