#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace skintone {

// Seeded generator whose derived draws do not depend on the standard
// library's distribution implementations, so fits and synthetic data are
// reproducible across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0,1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, bound); bound > 0.
  std::uint64_t below(std::uint64_t bound);

  /// Standard normal (Box-Muller, one value per call).
  double normal();

 private:
  std::mt19937_64 engine_;
};

/// k distinct indices from [0, n), returned in increasing order. If k >= n
/// all indices are returned.
std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k,
                                        std::uint64_t seed);

}  // namespace skintone
