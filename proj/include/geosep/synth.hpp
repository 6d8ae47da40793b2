#pragma once

#include <cstddef>
#include <cstdint>

#include "geosep/core.hpp"
#include "geosep/rng.hpp"

namespace geosep {

// Isotropic Gaussian blobs (unit variance). Class c is centred at
// spread * e_c, so every pair of centres is spread * sqrt(2) apart.
// Labels cycle 0..classes-1 over the rows. Requires dim >= classes.
struct BlobSpec {
  std::size_t n = 5000;
  std::size_t dim = 20;
  std::size_t classes = 4;
  double spread = 2.15;  // about 85% nearest-centroid accuracy at the defaults
  std::uint64_t seed = 0;
};

Dataset make_blobs(const BlobSpec& spec);

// Grayscale images in [0,1]: each class is a fixed random prototype of a few
// soft strokes, each row that prototype plus clipped pixel noise.
struct ImageSpec {
  std::size_t n = 1000;
  std::size_t height = 28;
  std::size_t width = 28;
  std::size_t classes = 10;
  double noise = 0.15;
  std::uint64_t seed = 0;
};

Dataset make_images(const ImageSpec& spec);

// Standard normal draw (Box-Muller on two uniforms).
double normal(Rng& rng);

}  // namespace geosep
