#pragma once

#include <cstdint>
#include <vector>

namespace inrsep {

// xoshiro256++ (Blackman & Vigna, 2019), seeded through splitmix64.
// Chosen over std::mt19937 because the algorithm is fully specified and
// identical on every platform, which the reproducibility contract relies on.
// All randomness in the project (weight init, batch shuffling, synthetic
// field generation, Poisson draws) goes through this generator.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();

  // Uniform in [0, 1), 53-bit mantissa.
  double uniform01();
  // Uniform in [lo, hi).
  double uniform(double lo, double hi);
  // Unbiased integer in [0, n), n > 0. Rejection sampling.
  std::uint64_t below(std::uint64_t n);

  // Fisher-Yates, fixed traversal order.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    if (v.size() < 2) return;
    for (std::size_t i = v.size() - 1; i > 0; --i) {
      const std::size_t j = static_cast<std::size_t>(below(i + 1));
      std::swap(v[i], v[j]);
    }
  }

  // Poisson draw with the given mean. Knuth inversion below mean 10,
  // Hormann's PTRS transformed rejection above. Deterministic given the
  // generator state.
  std::uint64_t poisson(double mean);

 private:
  std::uint64_t s_[4];
};

}  // namespace inrsep
