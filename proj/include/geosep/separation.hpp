#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "geosep/core.hpp"
#include "geosep/error.hpp"
#include "geosep/metric.hpp"

namespace geosep {

enum class SeparationMode { Fast, Exact };

std::string_view to_string(SeparationMode mode) noexcept;
SeparationMode parse_mode(std::string_view text);

// Signed zone radius of a query: positive when the query is strictly closer
// to training rows of its predicted class than to any other row (safe),
// non-positive otherwise (dangerous).
struct SeparationScore {
  double value = 0.0;
  SeparationMode mode = SeparationMode::Fast;
  double d_same = 0.0;   // distance to the nearest same-class training row
  double d_other = 0.0;  // distance to the nearest other-class training row
  bool is_safe = false;
};

// Training-row ids split by whether their label equals the predicted label.
// Both lists are ascending.
struct ClassPartition {
  std::vector<std::size_t> same_class;
  std::vector<std::size_t> other_class;
};

ClassPartition partition(const Dataset& train, Label predicted_label);

// Half the gap between the two nearest-set distances. A zone under any metric.
SeparationScore fast_separation(std::span<const float> x, const Dataset& train, const ClassPartition& part,
                                MetricKind m);

// Same score without materializing the partition: one pass over train.
SeparationScore fast_separation(std::span<const float> x, const Dataset& train, Label predicted_label,
                                MetricKind m);

// Distance from x to the perpendicular bisector of (near, far), positive on
// near's side. Requires d(x,near) < d(x,far) under L2.
template <typename T>
double pairwise_zone(std::span<const T> x, std::span<const T> near, std::span<const T> far) {
  if (x.size() != near.size() || x.size() != far.size()) {
    throw Error(ErrorCode::DimensionError, "pairwise_zone arguments differ in dimension");
  }
  const double gap = distance<T, T>(near, far, MetricKind::L2);
  if (gap == 0.0) throw Error(ErrorCode::DegenerateTriple, "near and far points coincide");
  const double d_near = distance<T, T>(x, near, MetricKind::L2);
  const double d_far = distance<T, T>(x, far, MetricKind::L2);
  if (!(d_near < d_far)) throw Error(ErrorCode::OrderingError, "expected d(x,near) < d(x,far)");
  // (d_far^2 - d_near^2) / (2 gap), factored to avoid cancellation.
  return (d_far - d_near) * (d_far + d_near) / (2.0 * gap);
}

inline double pairwise_zone(std::span<const double> x, std::span<const double> near, std::span<const double> far) {
  return pairwise_zone<double>(x, near, far);
}
inline double pairwise_zone(std::span<const float> x, std::span<const float> near, std::span<const float> far) {
  return pairwise_zone<float>(x, near, far);
}

// min over far in `other` of max over near in `same` (with d(x,near) <
// d(x,far)) of pairwise_zone. Always a zone; not always the maximal one. L2.
double bisector_bound(std::span<const float> x, const Dataset& train, std::span<const std::size_t> same,
                      std::span<const std::size_t> other);

// Signed radius of the maximal zone under L2. For a safe x this is the
// distance from x to the union of the Voronoi cells (relative to the
// same-class rows) of every other-class row; dangerous inputs swap roles and
// negate. Ties score 0 and count as dangerous.
SeparationScore exact_separation(std::span<const float> x, const Dataset& train, const ClassPartition& part);

struct ScoreRow {
  std::size_t index = 0;
  Label predicted_label = 0;
  Label true_label = 0;
  bool correct = false;
  std::optional<SeparationScore> score;  // empty when this row failed
  std::string error;
};

struct BatchOptions {
  SeparationMode mode = SeparationMode::Fast;
  MetricKind metric = MetricKind::L2;
  std::size_t workers = 1;
};

// Scores every prediction against `train`. Rows come back in input order for
// any worker count; a failing row records its error and the batch goes on.
std::vector<ScoreRow> batch_separation(const Dataset& queries, std::span<const PredictionRecord> preds,
                                       const Dataset& train, const BatchOptions& opts);

// Score-file CSV: index,predicted_label,true_label,correct,separation,is_safe,
// d_same,d_other,mode,metric. Failed rows leave the numeric fields empty.
std::string format_scores(std::span<const ScoreRow> rows, MetricKind metric);
std::vector<ScoreRow> parse_scores(std::string_view text);
void save_scores(std::span<const ScoreRow> rows, MetricKind metric, const std::filesystem::path& path);
std::vector<ScoreRow> load_scores(const std::filesystem::path& path);

}  // namespace geosep
