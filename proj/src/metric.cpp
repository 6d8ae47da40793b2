#include "geosep/metric.hpp"

#include <limits>

namespace geosep {

double scan_key(std::span<const float> x, std::span<const float> y, MetricKind m) noexcept {
  if (m != MetricKind::L2) return detail::distance_unchecked(x, y, m);
  double acc = 0.0;
  const std::size_t n = x.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double v = static_cast<double>(x[i]) - static_cast<double>(y[i]);
    acc += v * v;
  }
  return acc;
}

double key_to_distance(double key, MetricKind m) noexcept { return m == MetricKind::L2 ? std::sqrt(key) : key; }

SetDistance set_distance(std::span<const float> x, const Dataset& data, std::span<const std::size_t> rows,
                         MetricKind m) {
  if (rows.empty()) throw Error(ErrorCode::EmptyClassSet, "nearest-row query against an empty set");
  if (x.size() != data.cols()) {
    throw Error(ErrorCode::DimensionError,
                "query has dimension " + std::to_string(x.size()) + ", set has " + std::to_string(data.cols()));
  }
  double best = std::numeric_limits<double>::infinity();
  std::size_t arg = std::numeric_limits<std::size_t>::max();
  for (std::size_t r : rows) {
    if (r >= data.rows()) throw Error(ErrorCode::IndexError, "row " + std::to_string(r) + " out of range");
    const double k = scan_key(x, data.row(r), m);
    if (k < best || (k == best && r < arg)) {
      best = k;
      arg = r;
    }
  }
  return {key_to_distance(best, m), arg};
}

SetDistance set_distance(std::span<const float> x, const Dataset& data, MetricKind m) {
  if (data.rows() == 0) throw Error(ErrorCode::EmptyClassSet, "nearest-row query against an empty set");
  if (x.size() != data.cols()) {
    throw Error(ErrorCode::DimensionError,
                "query has dimension " + std::to_string(x.size()) + ", set has " + std::to_string(data.cols()));
  }
  double best = std::numeric_limits<double>::infinity();
  std::size_t arg = 0;
  for (std::size_t r = 0; r < data.rows(); ++r) {
    const double k = scan_key(x, data.row(r), m);
    if (k < best) {
      best = k;
      arg = r;
    }
  }
  return {key_to_distance(best, m), arg};
}

}  // namespace geosep
