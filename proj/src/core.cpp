#include "geosep/core.hpp"

#include <algorithm>

#include "geosep/error.hpp"
#include "geosep/rng.hpp"

namespace geosep {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::TooFewRows: return "TooFewRows";
    case ErrorCode::DimensionError: return "DimensionError";
    case ErrorCode::EmptyClassSet: return "EmptyClassSet";
    case ErrorCode::EmptyComplement: return "EmptyComplement";
    case ErrorCode::DegenerateTriple: return "DegenerateTriple";
    case ErrorCode::OrderingError: return "OrderingError";
    case ErrorCode::IndexError: return "IndexError";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::DegenerateFit: return "DegenerateFit";
    case ErrorCode::RangeError: return "RangeError";
    case ErrorCode::MissingSignal: return "MissingSignal";
    case ErrorCode::ShapeError: return "ShapeError";
    case ErrorCode::ReductionTooAggressive: return "ReductionTooAggressive";
    case ErrorCode::ParameterError: return "ParameterError";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::NumericError: return "NumericError";
  }
  return "UnknownError";
}

ErrorCategory category_of(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ParameterError:
    case ErrorCode::ConfigError:
      return ErrorCategory::Config;
    case ErrorCode::DegenerateFit:
    case ErrorCode::NumericError:
      return ErrorCategory::Numeric;
    default:
      return ErrorCategory::Data;
  }
}

Dataset::Dataset(std::size_t cols, std::vector<float> features, std::vector<Label> labels,
                 std::optional<ImageShape> shape)
    : cols_(cols), features_(std::move(features)), labels_(std::move(labels)), shape_(shape) {
  if (cols_ == 0 && !labels_.empty()) throw Error(ErrorCode::DimensionError, "dataset has zero feature columns");
  if (features_.size() != labels_.size() * cols_) {
    throw Error(ErrorCode::DimensionError,
                "feature buffer holds " + std::to_string(features_.size()) + " values, expected " +
                    std::to_string(labels_.size()) + " x " + std::to_string(cols_));
  }
  if (shape_ && shape_->size() != cols_) {
    throw Error(ErrorCode::ShapeError, "image shape " + std::to_string(shape_->height) + "x" +
                                           std::to_string(shape_->width) + "x" +
                                           std::to_string(shape_->channels) + " does not match d=" +
                                           std::to_string(cols_));
  }
  for (Label l : labels_) num_classes_ = std::max<std::size_t>(num_classes_, std::size_t{l} + 1);
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  std::vector<float> feats;
  feats.reserve(indices.size() * cols_);
  std::vector<Label> labs;
  labs.reserve(indices.size());
  for (std::size_t i : indices) {
    if (i >= rows()) throw Error(ErrorCode::IndexError, "row " + std::to_string(i) + " out of range");
    auto r = row(i);
    feats.insert(feats.end(), r.begin(), r.end());
    labs.push_back(labels_[i]);
  }
  return Dataset(cols_, std::move(feats), std::move(labs), shape_);
}

std::string_view to_string(MetricKind m) noexcept {
  switch (m) {
    case MetricKind::L1: return "l1";
    case MetricKind::L2: return "l2";
    case MetricKind::Linf: return "linf";
  }
  return "l2";
}

MetricKind parse_metric(std::string_view text) {
  if (text == "l1" || text == "L1") return MetricKind::L1;
  if (text == "l2" || text == "L2") return MetricKind::L2;
  if (text == "linf" || text == "Linf" || text == "LINF") return MetricKind::Linf;
  throw Error(ErrorCode::ConfigError, "unknown metric '" + std::string(text) + "' (expected l1, l2 or linf)");
}

SplitSizes split_sizes(std::size_t n) {
  SplitSizes s;
  s.train = n * 6 / 10;
  s.val = n * 2 / 10;
  s.test = n - s.train - s.val;
  return s;
}

SplitIndices split_indices(std::size_t n, const SplitSpec& spec) {
  if (n < 5) throw Error(ErrorCode::TooFewRows, "need at least 5 rows to split, got " + std::to_string(n));
  Rng rng(spec.seed);
  const auto perm = permutation(n, rng);
  const auto sizes = split_sizes(n);
  SplitIndices out;
  out.train.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(sizes.train));
  out.val.assign(perm.begin() + static_cast<std::ptrdiff_t>(sizes.train),
                 perm.begin() + static_cast<std::ptrdiff_t>(sizes.train + sizes.val));
  out.test.assign(perm.begin() + static_cast<std::ptrdiff_t>(sizes.train + sizes.val), perm.end());
  return out;
}

SplitResult split_dataset(const Dataset& ds, const SplitSpec& spec) {
  const auto idx = split_indices(ds.rows(), spec);
  return {ds.subset(idx.train), ds.subset(idx.val), ds.subset(idx.test)};
}

}  // namespace geosep
