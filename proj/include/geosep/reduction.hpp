#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "geosep/core.hpp"

namespace geosep {

// Every method shrinks the stored scalar count by t^2: pixel methods shrink
// each row, set methods shrink the number of rows.
enum class ReductionMethod { Pool, MaxPool, Pca, Rbi, RandPix, KMeans, RandSet };

std::string_view to_string(ReductionMethod m) noexcept;
ReductionMethod parse_reduction_method(std::string_view text);
bool is_set_method(ReductionMethod m) noexcept;

struct ReductionConfig {
  ReductionMethod method = ReductionMethod::Pool;
  std::size_t t = 2;
  std::uint64_t seed = 0;

  friend bool operator==(const ReductionConfig&, const ReductionConfig&) = default;
};

enum class PoolFn { Avg, Max };

// Luma 0.299 R + 0.587 G + 0.114 B per pixel; (h,w,3) -> (h,w,1).
Dataset grayscale(const Dataset& ds);

// t x t patches per channel; h and w must be divisible by t.
Dataset pool(const Dataset& ds, std::size_t t, PoolFn fn);

// Bilinear resize to (h/t, w/t) (floored) with half-pixel centers and edge
// clamping. t = 1 is the identity.
Dataset resize_bilinear(const Dataset& ds, std::size_t t);

// Everything needed to send a new query into the reduced representation.
struct ReducedSpace {
  ReductionConfig config;
  std::size_t input_dim = 0;
  std::optional<ImageShape> input_shape;

  std::vector<std::size_t> pixel_indices;  // randpix, ascending
  std::vector<float> pca_mean;             // pca: input_dim entries
  std::vector<float> pca_basis;            // pca: k x input_dim, row-major
  std::optional<Dataset> reduced_set;      // kmeans / randset

  std::size_t output_dim() const;
  std::optional<ImageShape> output_shape() const;

  // Pixel methods map features; set methods leave rows untouched.
  std::vector<float> map_row(std::span<const float> row) const;
  Dataset map(const Dataset& ds) const;

  // The training set separation runs against after reduction.
  Dataset reduce_train(const Dataset& train) const;

  friend bool operator==(const ReducedSpace&, const ReducedSpace&) = default;
};

// Principal directions of the train rows: k = floor(d / t^2) leading
// eigenvectors of the sample covariance, each signed so that its
// largest-magnitude entry is positive.
ReducedSpace pca_fit(const Dataset& train, std::size_t t);
Dataset pca_project(const ReducedSpace& space, const Dataset& ds);

ReducedSpace sample_pixels(const Dataset& train, std::size_t t, std::uint64_t seed);

struct KMeansOptions {
  int max_iterations = 300;
  double relative_tolerance = 1e-4;
};

// k-means++ seeding then Lloyd iterations, run separately per class with
// k_c = max(1, floor(n_c / t^2)). Centroids keep their class label and are
// emitted class by class in ascending label order.
ReducedSpace kmeans_reduce(const Dataset& train, std::size_t t, std::uint64_t seed, KMeansOptions opts = {});

ReducedSpace sample_set(const Dataset& train, std::size_t t, std::uint64_t seed);

ReducedSpace build_space(const Dataset& train, const ReductionConfig& config);

// Stored scalar count of a dataset: rows x cols.
std::size_t stored_scalars(const Dataset& ds) noexcept;

// JSON descriptor at `path`; PCA parameters go to "<stem>.bin" as
// little-endian f32 and reduced sets to "<stem>.set.bin" (core binary format).
void save_space(const ReducedSpace& space, const std::filesystem::path& path);
ReducedSpace load_space(const std::filesystem::path& path);

// Lloyd's algorithm on raw double rows; exposed for testing.
struct KMeansResult {
  std::vector<double> centroids;  // k x d
  std::vector<std::size_t> assignment;
  double inertia = 0.0;
  int iterations = 0;
};

KMeansResult kmeans(std::span<const double> points, std::size_t n, std::size_t d, std::size_t k,
                    std::uint64_t seed, KMeansOptions opts = {});

}  // namespace geosep
