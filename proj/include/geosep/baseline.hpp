#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "geosep/core.hpp"

namespace geosep {

// Nearest-centroid classifier. Confidence is the softmax of -d_c / temperature
// over class centroids, read at the predicted class.
struct CentroidModel {
  std::size_t dim = 0;
  std::vector<Label> classes;      // ascending
  std::vector<double> centroids;   // classes.size() x dim
  double temperature = 1.0;
};

CentroidModel fit_centroid(const Dataset& train, double temperature = 1.0);

PredictionRecord predict_centroid(const CentroidModel& model, std::span<const float> x);

// Softmax weights over model.classes; sums to 1.
std::vector<double> centroid_probabilities(const CentroidModel& model, std::span<const float> x);

// Majority label of the k nearest train rows (L2). k must be odd and <= n.
PredictionRecord predict_knn(const Dataset& train, std::span<const float> x, std::size_t k);

enum class ModelKind { Centroid, Knn };

std::string_view to_string(ModelKind kind) noexcept;
ModelKind parse_model_kind(std::string_view text);

struct ModelOptions {
  ModelKind kind = ModelKind::Centroid;
  double temperature = 1.0;
  std::size_t k = 5;
  std::size_t workers = 1;
};

// Predictions for every query row; record i carries index i.
std::vector<PredictionRecord> predict_all(const Dataset& train, const Dataset& queries, const ModelOptions& opts);

}  // namespace geosep
