#include "geosep/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "geosep/error.hpp"
#include "geosep/rng.hpp"

namespace geosep {

double normal(Rng& rng) {
  const double u1 = 1.0 - rng.uniform();  // (0, 1]
  const double u2 = rng.uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Dataset make_blobs(const BlobSpec& spec) {
  if (spec.classes < 1 || spec.dim < spec.classes) {
    throw Error(ErrorCode::ParameterError, "blobs need 1 <= classes <= dim");
  }
  if (spec.n == 0) throw Error(ErrorCode::ParameterError, "blobs need n >= 1");
  Rng rng(spec.seed);
  std::vector<float> feats(spec.n * spec.dim);
  std::vector<Label> labels(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) {
    const auto c = static_cast<Label>(i % spec.classes);
    labels[i] = c;
    for (std::size_t j = 0; j < spec.dim; ++j) {
      feats[i * spec.dim + j] = static_cast<float>(normal(rng) + (j == c ? spec.spread : 0.0));
    }
  }
  return Dataset(spec.dim, std::move(feats), std::move(labels));
}

Dataset make_images(const ImageSpec& spec) {
  if (spec.classes < 1 || spec.height == 0 || spec.width == 0) {
    throw Error(ErrorCode::ParameterError, "images need positive size and at least one class");
  }
  const std::size_t d = spec.height * spec.width;
  Rng rng(spec.seed);
  std::vector<std::vector<double>> protos(spec.classes, std::vector<double>(d, 0.0));
  for (auto& p : protos) {
    for (int stroke = 0; stroke < 4; ++stroke) {
      const double cy = rng.uniform() * static_cast<double>(spec.height);
      const double cx = rng.uniform() * static_cast<double>(spec.width);
      const double r = 1.5 + 3.0 * rng.uniform();
      for (std::size_t y = 0; y < spec.height; ++y) {
        for (std::size_t x = 0; x < spec.width; ++x) {
          const double dy = static_cast<double>(y) - cy;
          const double dx = static_cast<double>(x) - cx;
          p[y * spec.width + x] += std::exp(-(dx * dx + dy * dy) / (2 * r * r));
        }
      }
    }
    for (auto& v : p) v = std::min(1.0, v);
  }
  std::vector<float> feats(spec.n * d);
  std::vector<Label> labels(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) {
    const auto c = static_cast<Label>(i % spec.classes);
    labels[i] = c;
    for (std::size_t j = 0; j < d; ++j) {
      feats[i * d + j] = static_cast<float>(std::clamp(protos[c][j] + spec.noise * normal(rng), 0.0, 1.0));
    }
  }
  return Dataset(d, std::move(feats), std::move(labels), ImageShape{spec.height, spec.width, 1});
}

}  // namespace geosep
