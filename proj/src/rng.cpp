#include "geosep/rng.hpp"

#include <numeric>
#include <utility>

namespace geosep {

std::uint64_t Rng::next() noexcept {
  std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t Rng::below(std::uint64_t bound) noexcept {
  // Reject the top partial bucket so every residue is equally likely.
  const std::uint64_t limit = -bound % bound;  // (2^64 - bound) mod bound
  for (;;) {
    const std::uint64_t x = next();
    if (x >= limit) return x % bound;
  }
}

double Rng::uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::vector<std::size_t> permutation(std::size_t n, Rng& rng) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  for (std::size_t i = n; i-- > 1;) {
    const auto j = static_cast<std::size_t>(rng.below(i + 1));
    std::swap(perm[i], perm[j]);
  }
  return perm;
}

std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k, Rng& rng) {
  auto perm = permutation(n, rng);
  perm.resize(k < n ? k : n);
  return perm;
}

}  // namespace geosep
