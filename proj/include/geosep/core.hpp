#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace geosep {

using Label = std::uint32_t;

struct ImageShape {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t channels = 0;

  std::size_t size() const noexcept { return height * width * channels; }
  friend bool operator==(const ImageShape&, const ImageShape&) = default;
};

// Row-major n x d feature matrix with one dense class label per row.
// Image rows are stored height-major, then width, then channel (HWC).
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::size_t cols, std::vector<float> features, std::vector<Label> labels,
          std::optional<ImageShape> shape = std::nullopt);

  std::size_t rows() const noexcept { return labels_.size(); }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t num_classes() const noexcept { return num_classes_; }

  std::span<const float> row(std::size_t i) const noexcept {
    return {features_.data() + i * cols_, cols_};
  }
  Label label(std::size_t i) const noexcept { return labels_[i]; }

  const std::vector<float>& features() const noexcept { return features_; }
  const std::vector<Label>& labels() const noexcept { return labels_; }
  const std::optional<ImageShape>& shape() const noexcept { return shape_; }

  // Rows at the given indices, in that order.
  Dataset subset(std::span<const std::size_t> indices) const;

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  std::size_t cols_ = 0;
  std::size_t num_classes_ = 0;
  std::vector<float> features_;
  std::vector<Label> labels_;
  std::optional<ImageShape> shape_;
};

struct PredictionRecord {
  std::size_t index = 0;
  Label predicted_label = 0;
  std::optional<double> model_confidence;

  friend bool operator==(const PredictionRecord&, const PredictionRecord&) = default;
};

enum class MetricKind { L1, L2, Linf };

std::string_view to_string(MetricKind m) noexcept;
MetricKind parse_metric(std::string_view text);

enum class DataFormat { Csv, Binary };

struct LoadOptions {
  // Per-feature min-max rescaling to [0,1]; constant columns map to 0.
  bool normalize = false;
};

// Picks the format from the extension: ".csv" is CSV, anything else binary.
DataFormat format_for_path(const std::filesystem::path& path) noexcept;

Dataset load_dataset(const std::filesystem::path& path, DataFormat format, LoadOptions opts = {});
Dataset load_dataset(const std::filesystem::path& path, LoadOptions opts = {});
void save_dataset(const Dataset& ds, const std::filesystem::path& path, DataFormat format);
void save_dataset(const Dataset& ds, const std::filesystem::path& path);

// Sidecar holding the image shape: "<stem>.meta.json" next to the data file.
std::filesystem::path meta_path_for(const std::filesystem::path& path);

Dataset parse_csv_dataset(std::string_view text);
std::string format_csv_dataset(const Dataset& ds);

std::vector<PredictionRecord> load_predictions(const std::filesystem::path& path);
void save_predictions(std::span<const PredictionRecord> preds, const std::filesystem::path& path);
std::vector<PredictionRecord> parse_predictions(std::string_view text);
std::string format_predictions(std::span<const PredictionRecord> preds);

std::string read_text_file(const std::filesystem::path& path);
// Creates parent directories as needed.
void write_text_file(const std::filesystem::path& path, std::string_view bytes);

// 9 significant digits ("%.9g"), enough to round-trip any f32.
std::string format_real(double value);

struct SplitSpec {
  std::uint64_t seed = 0;
  static constexpr double kTrainFraction = 0.6;
  static constexpr double kValFraction = 0.2;
};

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> val;
  std::vector<std::size_t> test;
};

struct SplitSizes {
  std::size_t train = 0;
  std::size_t val = 0;
  std::size_t test = 0;
};

SplitSizes split_sizes(std::size_t n);

// Permutes 0..n-1 with the seeded Fisher-Yates shuffle and cuts it into
// train/val/test blocks of split_sizes(n).
SplitIndices split_indices(std::size_t n, const SplitSpec& spec);

struct SplitResult {
  Dataset train;
  Dataset val;
  Dataset test;
};

SplitResult split_dataset(const Dataset& ds, const SplitSpec& spec);

}  // namespace geosep
