#include "geosep/separation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Dense>

#include "geosep/nnls.hpp"
#include "geosep/parallel.hpp"

namespace geosep {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_nonempty(const ClassPartition& part) {
  if (part.same_class.empty()) throw Error(ErrorCode::EmptyClassSet, "no training row has the predicted label");
  if (part.other_class.empty()) {
    throw Error(ErrorCode::EmptyComplement, "every training row has the predicted label");
  }
}

void require_dim(std::span<const float> x, const Dataset& train) {
  if (x.size() != train.cols()) {
    throw Error(ErrorCode::DimensionError,
                "query has dimension " + std::to_string(x.size()) + ", train has " + std::to_string(train.cols()));
  }
}

SeparationScore make_fast(double d_same, double d_other) {
  SeparationScore s;
  s.mode = SeparationMode::Fast;
  s.d_same = d_same;
  s.d_other = d_other;
  s.is_safe = d_same < d_other;
  s.value = (d_other - d_same) / 2.0;
  return s;
}

// Distance from x to the closed cell {y : d(y, far) <= d(y, near) for all
// near in `inner`}. `dist_inner[i]` caches d(x, inner[i]); `d_far` is d(x, far).
double cell_distance(std::span<const float> x, const Dataset& train, std::size_t far,
                     std::span<const std::size_t> inner, std::span<const double> dist_inner, double d_far,
                     double lower_bound) {
  const std::size_t dim = x.size();
  auto far_row = train.row(far);
  Eigen::MatrixXd G(static_cast<Eigen::Index>(inner.size()), static_cast<Eigen::Index>(dim));
  Eigen::VectorXd h(static_cast<Eigen::Index>(inner.size()));
  Eigen::Index m = 0;
  for (std::size_t i = 0; i < inner.size(); ++i) {
    auto near_row = train.row(inner[i]);
    const double gap = detail::distance_unchecked(near_row, far_row, MetricKind::L2);
    if (gap == 0.0) continue;  // coincident rows: the constraint holds everywhere
    for (std::size_t k = 0; k < dim; ++k) {
      G(m, static_cast<Eigen::Index>(k)) = (static_cast<double>(far_row[k]) - near_row[k]) / gap;
    }
    const double d_near = dist_inner[i];
    h(m) = (d_far - d_near) * (d_far + d_near) / (2.0 * gap);
    ++m;
  }
  if (m == 0) return 0.0;
  const auto z = least_distance(G.topRows(m), h.head(m));
  if (!z) throw Error(ErrorCode::NumericError, "opposite-class cell reported empty");
  // The cell contains `far` itself and lies beyond every bisector.
  return std::clamp(z->norm(), lower_bound, d_far);
}

// Radius of the largest ball around x inside which every point is strictly
// closer to `inner` than to `outer`, given that x itself is.
double maximal_zone(std::span<const float> x, const Dataset& train, std::span<const std::size_t> inner,
                    std::span<const double> dist_inner, std::span<const std::size_t> outer,
                    std::span<const double> dist_outer) {
  std::vector<double> bound(outer.size(), -kInf);
  for (std::size_t j = 0; j < outer.size(); ++j) {
    auto far_row = train.row(outer[j]);
    const double d_far = dist_outer[j];
    for (std::size_t i = 0; i < inner.size(); ++i) {
      const double d_near = dist_inner[i];
      if (!(d_near < d_far)) continue;
      const double gap = detail::distance_unchecked(train.row(inner[i]), far_row, MetricKind::L2);
      bound[j] = std::max(bound[j], (d_far - d_near) * (d_far + d_near) / (2.0 * gap));
    }
  }
  std::vector<std::size_t> order(outer.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return bound[a] < bound[b]; });

  double best = kInf;
  for (std::size_t j : order) {
    if (bound[j] >= best) break;
    best = std::min(best, cell_distance(x, train, outer[j], inner, dist_inner, dist_outer[j], bound[j]));
  }
  return best;
}

std::vector<double> distances_to(std::span<const float> x, const Dataset& train, std::span<const std::size_t> rows) {
  std::vector<double> out(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out[i] = detail::distance_unchecked(x, train.row(rows[i]), MetricKind::L2);
  }
  return out;
}

double min_of(std::span<const double> v) { return *std::min_element(v.begin(), v.end()); }

}  // namespace

std::string_view to_string(SeparationMode mode) noexcept { return mode == SeparationMode::Exact ? "exact" : "fast"; }

SeparationMode parse_mode(std::string_view text) {
  if (text == "fast") return SeparationMode::Fast;
  if (text == "exact") return SeparationMode::Exact;
  throw Error(ErrorCode::ConfigError, "unknown mode '" + std::string(text) + "' (expected fast or exact)");
}

ClassPartition partition(const Dataset& train, Label predicted_label) {
  if (train.rows() == 0) throw Error(ErrorCode::EmptyInput, "training set is empty");
  ClassPartition part;
  for (std::size_t r = 0; r < train.rows(); ++r) {
    (train.label(r) == predicted_label ? part.same_class : part.other_class).push_back(r);
  }
  if (part.same_class.empty()) {
    throw Error(ErrorCode::EmptyClassSet, "label " + std::to_string(predicted_label) + " absent from train");
  }
  if (part.other_class.empty()) {
    throw Error(ErrorCode::EmptyComplement, "every training row has label " + std::to_string(predicted_label));
  }
  return part;
}

SeparationScore fast_separation(std::span<const float> x, const Dataset& train, const ClassPartition& part,
                                MetricKind m) {
  require_nonempty(part);
  require_dim(x, train);
  const auto same = set_distance(x, train, part.same_class, m);
  const auto other = set_distance(x, train, part.other_class, m);
  return make_fast(same.distance, other.distance);
}

SeparationScore fast_separation(std::span<const float> x, const Dataset& train, Label predicted_label,
                                MetricKind m) {
  require_dim(x, train);
  double best_same = kInf;
  double best_other = kInf;
  bool any_same = false;
  bool any_other = false;
  const std::size_t n = train.rows();
  for (std::size_t r = 0; r < n; ++r) {
    const double k = scan_key(x, train.row(r), m);
    if (train.label(r) == predicted_label) {
      any_same = true;
      best_same = std::min(best_same, k);
    } else {
      any_other = true;
      best_other = std::min(best_other, k);
    }
  }
  if (!any_same) throw Error(ErrorCode::EmptyClassSet, "label " + std::to_string(predicted_label) + " absent from train");
  if (!any_other) {
    throw Error(ErrorCode::EmptyComplement, "every training row has label " + std::to_string(predicted_label));
  }
  return make_fast(key_to_distance(best_same, m), key_to_distance(best_other, m));
}

double bisector_bound(std::span<const float> x, const Dataset& train, std::span<const std::size_t> same,
                      std::span<const std::size_t> other) {
  if (same.empty()) throw Error(ErrorCode::EmptyClassSet, "empty same-class set");
  if (other.empty()) throw Error(ErrorCode::EmptyComplement, "empty other-class set");
  require_dim(x, train);
  const auto d_same = distances_to(x, train, same);
  const auto d_other = distances_to(x, train, other);
  double outer = kInf;
  for (std::size_t j = 0; j < other.size(); ++j) {
    double inner = -kInf;
    for (std::size_t i = 0; i < same.size(); ++i) {
      if (!(d_same[i] < d_other[j])) continue;
      const double gap = detail::distance_unchecked(train.row(same[i]), train.row(other[j]), MetricKind::L2);
      inner = std::max(inner, (d_other[j] - d_same[i]) * (d_other[j] + d_same[i]) / (2.0 * gap));
    }
    outer = std::min(outer, inner);
  }
  return outer;
}

SeparationScore exact_separation(std::span<const float> x, const Dataset& train, const ClassPartition& part) {
  require_nonempty(part);
  require_dim(x, train);
  const auto d_same = distances_to(x, train, part.same_class);
  const auto d_other = distances_to(x, train, part.other_class);
  SeparationScore s;
  s.mode = SeparationMode::Exact;
  s.d_same = min_of(d_same);
  s.d_other = min_of(d_other);
  s.is_safe = s.d_same < s.d_other;
  if (s.is_safe) {
    s.value = maximal_zone(x, train, part.same_class, d_same, part.other_class, d_other);
  } else if (s.d_same > s.d_other) {
    s.value = -maximal_zone(x, train, part.other_class, d_other, part.same_class, d_same);
  } else {
    s.value = 0.0;
  }
  return s;
}

std::vector<ScoreRow> batch_separation(const Dataset& queries, std::span<const PredictionRecord> preds,
                                       const Dataset& train, const BatchOptions& opts) {
  if (opts.mode == SeparationMode::Exact && opts.metric != MetricKind::L2) {
    throw Error(ErrorCode::ConfigError, "exact separation requires the l2 metric");
  }
  for (const auto& p : preds) {
    if (p.index >= queries.rows()) {
      throw Error(ErrorCode::IndexError, "prediction index " + std::to_string(p.index) + " exceeds query count " +
                                             std::to_string(queries.rows()));
    }
  }
  std::vector<ScoreRow> rows(preds.size());
  parallel_for(preds.size(), opts.workers, [&](std::size_t i) {
    const auto& p = preds[i];
    ScoreRow& row = rows[i];
    row.index = p.index;
    row.predicted_label = p.predicted_label;
    row.true_label = queries.label(p.index);
    row.correct = row.predicted_label == row.true_label;
    try {
      auto x = queries.row(p.index);
      if (opts.mode == SeparationMode::Fast) {
        row.score = fast_separation(x, train, p.predicted_label, opts.metric);
      } else {
        row.score = exact_separation(x, train, partition(train, p.predicted_label));
      }
    } catch (const Error& e) {
      row.error = e.what();
    }
  });
  return rows;
}

}  // namespace geosep
