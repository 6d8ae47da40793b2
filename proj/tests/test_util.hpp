#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "geosep/core.hpp"

namespace testutil {

inline std::filesystem::path tmp_dir(const std::string& name) {
  auto p = std::filesystem::path(GEOSEP_TEST_TMP) / name;
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

inline geosep::Dataset make(std::size_t cols, std::vector<float> feats, std::vector<geosep::Label> labels) {
  return geosep::Dataset(cols, std::move(feats), std::move(labels));
}

// Random 2-class cloud with both classes present.
inline geosep::Dataset random_two_class(std::mt19937_64& gen, std::size_t n, std::size_t d) {
  std::normal_distribution<float> nd(0.0f, 1.0f);
  std::vector<float> f(n * d);
  std::vector<geosep::Label> l(n);
  for (auto& v : f) v = nd(gen);
  for (std::size_t i = 0; i < n; ++i) l[i] = static_cast<geosep::Label>(i % 2);
  return {d, std::move(f), std::move(l)};
}

inline std::vector<float> random_point(std::mt19937_64& gen, std::size_t d, float scale = 1.0f) {
  std::normal_distribution<float> nd(0.0f, scale);
  std::vector<float> x(d);
  for (auto& v : x) v = nd(gen);
  return x;
}

}  // namespace testutil
