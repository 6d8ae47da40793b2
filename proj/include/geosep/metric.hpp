#pragma once

#include <cmath>
#include <cstddef>
#include <span>

#include "geosep/core.hpp"
#include "geosep/error.hpp"

namespace geosep {

struct SetDistance {
  double distance = 0.0;
  std::size_t argmin_index = 0;
};

namespace detail {

// Accumulates in double regardless of the element type.
template <typename A, typename B>
double distance_unchecked(std::span<const A> a, std::span<const B> b, MetricKind m) noexcept {
  const std::size_t n = a.size();
  switch (m) {
    case MetricKind::L1: {
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) acc += std::abs(static_cast<double>(a[i]) - static_cast<double>(b[i]));
      return acc;
    }
    case MetricKind::Linf: {
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double v = std::abs(static_cast<double>(a[i]) - static_cast<double>(b[i]));
        acc = v > acc ? v : acc;
      }
      return acc;
    }
    case MetricKind::L2:
    default: {
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double v = static_cast<double>(a[i]) - static_cast<double>(b[i]);
        acc += v * v;
      }
      return std::sqrt(acc);
    }
  }
}

}  // namespace detail

template <typename A, typename B>
double distance(std::span<const A> a, std::span<const B> b, MetricKind m) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::DimensionError,
                "vectors have dimensions " + std::to_string(a.size()) + " and " + std::to_string(b.size()));
  }
  return detail::distance_unchecked(a, b, m);
}

inline double distance(std::span<const float> a, std::span<const float> b, MetricKind m) {
  return distance<float, float>(a, b, m);
}
inline double distance(std::span<const double> a, std::span<const double> b, MetricKind m) {
  return distance<double, double>(a, b, m);
}

// Monotone surrogate of the metric used for nearest-row scans: squared
// distance for L2 (skips the sqrt), the distance itself otherwise.
double scan_key(std::span<const float> x, std::span<const float> y, MetricKind m) noexcept;
double key_to_distance(double key, MetricKind m) noexcept;

// Nearest member of {rows[i]} to x. Ties go to the lowest row id.
SetDistance set_distance(std::span<const float> x, const Dataset& data, std::span<const std::size_t> rows,
                         MetricKind m);

// Nearest row of the whole dataset.
SetDistance set_distance(std::span<const float> x, const Dataset& data, MetricKind m);

}  // namespace geosep
