#pragma once

#include <cstdint>
#include <vector>

namespace geosep {

// SplitMix64 stream. Every seeded step in the toolkit (splits, random
// pixel/row sampling, k-means++ seeding) draws from this generator so that
// the exact sequence can be reproduced outside C++; see docs/split.md.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next() noexcept;

  // Uniform integer in [0, bound) by rejection; bound must be > 0.
  std::uint64_t below(std::uint64_t bound) noexcept;

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept;

 private:
  std::uint64_t state_;
};

// Fisher-Yates permutation of 0..n-1: for i = n-1 down to 1, swap i with below(i+1).
std::vector<std::size_t> permutation(std::size_t n, Rng& rng);

// k distinct indices from [0, n), in the order drawn (first k entries of permutation()).
std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k, Rng& rng);

}  // namespace geosep
