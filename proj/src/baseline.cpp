#include "geosep/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "geosep/error.hpp"
#include "geosep/metric.hpp"
#include "geosep/parallel.hpp"

namespace geosep {
namespace {

std::vector<double> centroid_distances(const CentroidModel& model, std::span<const float> x) {
  if (x.size() != model.dim) {
    throw Error(ErrorCode::DimensionError,
                "query has dimension " + std::to_string(x.size()) + ", model expects " + std::to_string(model.dim));
  }
  std::vector<double> d(model.classes.size());
  for (std::size_t c = 0; c < d.size(); ++c) {
    d[c] = distance<float, double>(x, std::span<const double>(model.centroids.data() + c * model.dim, model.dim),
                                   MetricKind::L2);
  }
  return d;
}

}  // namespace

CentroidModel fit_centroid(const Dataset& train, double temperature) {
  if (train.rows() == 0) throw Error(ErrorCode::EmptyInput, "cannot fit on an empty train set");
  if (!(temperature > 0)) throw Error(ErrorCode::ParameterError, "temperature must be positive");
  std::map<Label, std::pair<std::vector<double>, std::size_t>> acc;
  for (std::size_t i = 0; i < train.rows(); ++i) {
    auto& [sum, count] = acc[train.label(i)];
    if (sum.empty()) sum.assign(train.cols(), 0.0);
    const auto row = train.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) sum[j] += row[j];
    ++count;
  }
  CentroidModel model;
  model.dim = train.cols();
  model.temperature = temperature;
  for (const auto& [label, entry] : acc) {
    model.classes.push_back(label);
    for (double s : entry.first) model.centroids.push_back(s / static_cast<double>(entry.second));
  }
  return model;
}

std::vector<double> centroid_probabilities(const CentroidModel& model, std::span<const float> x) {
  auto d = centroid_distances(model, x);
  const double dmin = *std::min_element(d.begin(), d.end());
  double total = 0.0;
  for (auto& v : d) {
    v = std::exp(-(v - dmin) / model.temperature);
    total += v;
  }
  for (auto& v : d) v /= total;
  return d;
}

PredictionRecord predict_centroid(const CentroidModel& model, std::span<const float> x) {
  const auto d = centroid_distances(model, x);
  const auto best = static_cast<std::size_t>(std::min_element(d.begin(), d.end()) - d.begin());
  double total = 0.0;
  for (double v : d) total += std::exp(-(v - d[best]) / model.temperature);
  PredictionRecord rec;
  rec.predicted_label = model.classes[best];
  rec.model_confidence = 1.0 / total;
  return rec;
}

PredictionRecord predict_knn(const Dataset& train, std::span<const float> x, std::size_t k) {
  if (k % 2 == 0) throw Error(ErrorCode::ParameterError, "k must be odd, got " + std::to_string(k));
  if (k > train.rows()) {
    throw Error(ErrorCode::ParameterError,
                "k=" + std::to_string(k) + " exceeds the train size " + std::to_string(train.rows()));
  }
  if (x.size() != train.cols()) throw Error(ErrorCode::DimensionError, "query dimension differs from train");
  std::vector<std::pair<double, std::size_t>> keyed(train.rows());
  for (std::size_t i = 0; i < train.rows(); ++i) keyed[i] = {scan_key(x, train.row(i), MetricKind::L2), i};
  // Pair ordering breaks distance ties by row id.
  std::partial_sort(keyed.begin(), keyed.begin() + static_cast<std::ptrdiff_t>(k), keyed.end());
  std::map<Label, std::size_t> votes;
  for (std::size_t i = 0; i < k; ++i) ++votes[train.label(keyed[i].second)];
  Label best = votes.begin()->first;
  std::size_t best_votes = 0;
  for (const auto& [label, n] : votes) {
    if (n > best_votes) {
      best = label;
      best_votes = n;
    }
  }
  PredictionRecord rec;
  rec.predicted_label = best;
  rec.model_confidence = static_cast<double>(best_votes) / static_cast<double>(k);
  return rec;
}

std::string_view to_string(ModelKind kind) noexcept { return kind == ModelKind::Knn ? "knn" : "centroid"; }

ModelKind parse_model_kind(std::string_view text) {
  if (text == "centroid") return ModelKind::Centroid;
  if (text == "knn") return ModelKind::Knn;
  throw Error(ErrorCode::ConfigError, "unknown model '" + std::string(text) + "' (expected centroid or knn)");
}

std::vector<PredictionRecord> predict_all(const Dataset& train, const Dataset& queries, const ModelOptions& opts) {
  std::vector<PredictionRecord> out(queries.rows());
  if (opts.kind == ModelKind::Centroid) {
    const auto model = fit_centroid(train, opts.temperature);
    parallel_for(queries.rows(), opts.workers, [&](std::size_t i) { out[i] = predict_centroid(model, queries.row(i)); });
  } else {
    if (opts.k % 2 == 0) throw Error(ErrorCode::ParameterError, "k must be odd, got " + std::to_string(opts.k));
    parallel_for(queries.rows(), opts.workers, [&](std::size_t i) { out[i] = predict_knn(train, queries.row(i), opts.k); });
  }
  for (std::size_t i = 0; i < out.size(); ++i) out[i].index = i;
  return out;
}

}  // namespace geosep
