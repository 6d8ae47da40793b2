#include "geosep/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include <nlohmann/json.hpp>

#include "geosep/error.hpp"
#include "geosep/rng.hpp"

namespace geosep {
namespace {

const ImageShape& require_shape(const Dataset& ds, std::string_view op) {
  if (!ds.shape()) throw Error(ErrorCode::ShapeError, std::string(op) + " needs image shape metadata");
  return *ds.shape();
}

void require_t(std::size_t t) {
  if (t < 1) throw Error(ErrorCode::ParameterError, "reduction parameter t must be >= 1");
}

std::vector<float> pool_row(std::span<const float> row, const ImageShape& s, std::size_t t, PoolFn fn) {
  const std::size_t oh = s.height / t;
  const std::size_t ow = s.width / t;
  const std::size_t c = s.channels;
  std::vector<float> out(oh * ow * c);
  for (std::size_t i = 0; i < oh; ++i) {
    for (std::size_t j = 0; j < ow; ++j) {
      for (std::size_t ch = 0; ch < c; ++ch) {
        double acc = fn == PoolFn::Max ? -std::numeric_limits<double>::infinity() : 0.0;
        for (std::size_t di = 0; di < t; ++di) {
          for (std::size_t dj = 0; dj < t; ++dj) {
            const double v = row[((i * t + di) * s.width + (j * t + dj)) * c + ch];
            acc = fn == PoolFn::Max ? std::max(acc, v) : acc + v;
          }
        }
        if (fn == PoolFn::Avg) acc /= static_cast<double>(t * t);
        out[(i * ow + j) * c + ch] = static_cast<float>(acc);
      }
    }
  }
  return out;
}

std::vector<float> resize_row(std::span<const float> row, const ImageShape& s, std::size_t t) {
  const std::size_t oh = s.height / t;
  const std::size_t ow = s.width / t;
  const std::size_t c = s.channels;
  const double sy = static_cast<double>(s.height) / static_cast<double>(oh);
  const double sx = static_cast<double>(s.width) / static_cast<double>(ow);
  auto axis = [](double pos, std::size_t len, std::size_t& lo, std::size_t& hi, double& frac) {
    pos = std::clamp(pos, 0.0, static_cast<double>(len - 1));
    lo = static_cast<std::size_t>(std::floor(pos));
    hi = std::min(lo + 1, len - 1);
    frac = pos - static_cast<double>(lo);
  };
  std::vector<float> out(oh * ow * c);
  for (std::size_t i = 0; i < oh; ++i) {
    std::size_t y0, y1;
    double wy;
    axis((static_cast<double>(i) + 0.5) * sy - 0.5, s.height, y0, y1, wy);
    for (std::size_t j = 0; j < ow; ++j) {
      std::size_t x0, x1;
      double wx;
      axis((static_cast<double>(j) + 0.5) * sx - 0.5, s.width, x0, x1, wx);
      for (std::size_t ch = 0; ch < c; ++ch) {
        auto at = [&](std::size_t y, std::size_t x) { return static_cast<double>(row[(y * s.width + x) * c + ch]); };
        const double top = at(y0, x0) + wx * (at(y0, x1) - at(y0, x0));
        const double bottom = at(y1, x0) + wx * (at(y1, x1) - at(y1, x0));
        out[(i * ow + j) * c + ch] = static_cast<float>(top + wy * (bottom - top));
      }
    }
  }
  return out;
}

template <typename RowFn>
Dataset map_rows(const Dataset& ds, std::size_t out_dim, std::optional<ImageShape> out_shape, RowFn&& fn) {
  std::vector<float> feats;
  feats.reserve(ds.rows() * out_dim);
  for (std::size_t i = 0; i < ds.rows(); ++i) {
    const auto r = fn(ds.row(i));
    feats.insert(feats.end(), r.begin(), r.end());
  }
  return Dataset(out_dim, std::move(feats), ds.labels(), out_shape);
}

std::size_t reduced_count(std::size_t count, std::size_t t, std::string_view what) {
  const std::size_t k = count / (t * t);
  if (k < 1) {
    throw Error(ErrorCode::ReductionTooAggressive, "t^2 = " + std::to_string(t * t) + " exceeds the " +
                                                       std::string(what) + " count " + std::to_string(count));
  }
  return k;
}

void put_f32(std::string& out, float f) {
  std::uint32_t bits = 0;
  std::memcpy(&bits, &f, sizeof bits);
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
}

float get_f32(std::string_view bytes, std::size_t offset) {
  std::uint32_t bits = 0;
  for (int i = 0; i < 4; ++i) {
    bits |= std::uint32_t{static_cast<unsigned char>(bytes[offset + static_cast<std::size_t>(i)])} << (8 * i);
  }
  float f = 0;
  std::memcpy(&f, &bits, sizeof f);
  return f;
}

std::filesystem::path sibling(const std::filesystem::path& path, std::string_view suffix) {
  auto p = path;
  p.replace_extension();
  p += std::string(suffix);
  return p;
}

}  // namespace

std::string_view to_string(ReductionMethod m) noexcept {
  switch (m) {
    case ReductionMethod::Pool: return "pool";
    case ReductionMethod::MaxPool: return "maxpool";
    case ReductionMethod::Pca: return "pca";
    case ReductionMethod::Rbi: return "rbi";
    case ReductionMethod::RandPix: return "randpix";
    case ReductionMethod::KMeans: return "kmeans";
    case ReductionMethod::RandSet: return "randset";
  }
  return "pool";
}

ReductionMethod parse_reduction_method(std::string_view text) {
  for (auto m : {ReductionMethod::Pool, ReductionMethod::MaxPool, ReductionMethod::Pca, ReductionMethod::Rbi,
                 ReductionMethod::RandPix, ReductionMethod::KMeans, ReductionMethod::RandSet}) {
    if (text == to_string(m)) return m;
  }
  throw Error(ErrorCode::ConfigError, "unknown reduction '" + std::string(text) +
                                          "' (expected pool, maxpool, pca, rbi, randpix, kmeans or randset)");
}

bool is_set_method(ReductionMethod m) noexcept { return m == ReductionMethod::KMeans || m == ReductionMethod::RandSet; }

Dataset grayscale(const Dataset& ds) {
  const auto& s = require_shape(ds, "grayscale");
  if (s.channels != 3) {
    throw Error(ErrorCode::ShapeError, "grayscale needs 3 channels, got " + std::to_string(s.channels));
  }
  const std::size_t pixels = s.height * s.width;
  return map_rows(ds, pixels, ImageShape{s.height, s.width, 1}, [&](std::span<const float> row) {
    std::vector<float> out(pixels);
    for (std::size_t p = 0; p < pixels; ++p) {
      out[p] = static_cast<float>(0.299 * row[3 * p] + 0.587 * row[3 * p + 1] + 0.114 * row[3 * p + 2]);
    }
    return out;
  });
}

Dataset pool(const Dataset& ds, std::size_t t, PoolFn fn) {
  require_t(t);
  const auto s = require_shape(ds, "pooling");
  if (s.height % t != 0 || s.width % t != 0) {
    throw Error(ErrorCode::ShapeError, "pooling with t=" + std::to_string(t) + " needs height and width divisible by " +
                                           std::to_string(t) + ", got " + std::to_string(s.height) + "x" +
                                           std::to_string(s.width));
  }
  const ImageShape out{s.height / t, s.width / t, s.channels};
  return map_rows(ds, out.size(), out, [&](std::span<const float> row) { return pool_row(row, s, t, fn); });
}

Dataset resize_bilinear(const Dataset& ds, std::size_t t) {
  require_t(t);
  const auto s = require_shape(ds, "bilinear resize");
  if (s.height < t || s.width < t) {
    throw Error(ErrorCode::ShapeError, "image " + std::to_string(s.height) + "x" + std::to_string(s.width) +
                                           " is smaller than t=" + std::to_string(t));
  }
  const ImageShape out{s.height / t, s.width / t, s.channels};
  return map_rows(ds, out.size(), out, [&](std::span<const float> row) { return resize_row(row, s, t); });
}

std::size_t ReducedSpace::output_dim() const {
  switch (config.method) {
    case ReductionMethod::Pool:
    case ReductionMethod::MaxPool:
    case ReductionMethod::Rbi:
      return output_shape()->size();
    case ReductionMethod::Pca:
      return input_dim == 0 ? 0 : pca_basis.size() / input_dim;
    case ReductionMethod::RandPix:
      return pixel_indices.size();
    case ReductionMethod::KMeans:
    case ReductionMethod::RandSet:
      return input_dim;
  }
  return input_dim;
}

std::optional<ImageShape> ReducedSpace::output_shape() const {
  switch (config.method) {
    case ReductionMethod::Pool:
    case ReductionMethod::MaxPool:
    case ReductionMethod::Rbi:
      return ImageShape{input_shape->height / config.t, input_shape->width / config.t, input_shape->channels};
    case ReductionMethod::KMeans:
    case ReductionMethod::RandSet:
      return input_shape;
    default:
      return std::nullopt;
  }
}

std::vector<float> ReducedSpace::map_row(std::span<const float> row) const {
  if (row.size() != input_dim) {
    throw Error(ErrorCode::DimensionError, "row has dimension " + std::to_string(row.size()) +
                                               ", reduced space expects " + std::to_string(input_dim));
  }
  switch (config.method) {
    case ReductionMethod::Pool: return pool_row(row, *input_shape, config.t, PoolFn::Avg);
    case ReductionMethod::MaxPool: return pool_row(row, *input_shape, config.t, PoolFn::Max);
    case ReductionMethod::Rbi: return resize_row(row, *input_shape, config.t);
    case ReductionMethod::RandPix: {
      std::vector<float> out(pixel_indices.size());
      for (std::size_t k = 0; k < pixel_indices.size(); ++k) out[k] = row[pixel_indices[k]];
      return out;
    }
    case ReductionMethod::Pca: {
      const std::size_t k = output_dim();
      std::vector<float> out(k);
      for (std::size_t a = 0; a < k; ++a) {
        double acc = 0.0;
        const float* dir = pca_basis.data() + a * input_dim;
        for (std::size_t j = 0; j < input_dim; ++j) {
          acc += static_cast<double>(dir[j]) * (static_cast<double>(row[j]) - pca_mean[j]);
        }
        out[a] = static_cast<float>(acc);
      }
      return out;
    }
    case ReductionMethod::KMeans:
    case ReductionMethod::RandSet:
      break;
  }
  return {row.begin(), row.end()};
}

Dataset ReducedSpace::map(const Dataset& ds) const {
  if (is_set_method(config.method)) {
    if (ds.cols() != input_dim) throw Error(ErrorCode::DimensionError, "dataset dimension differs from reduced space");
    return ds;
  }
  return map_rows(ds, output_dim(), output_shape(), [&](std::span<const float> row) { return map_row(row); });
}

Dataset ReducedSpace::reduce_train(const Dataset& train) const {
  if (reduced_set) return *reduced_set;
  return map(train);
}

ReducedSpace sample_pixels(const Dataset& train, std::size_t t, std::uint64_t seed) {
  require_t(t);
  const std::size_t k = reduced_count(train.cols(), t, "feature");
  ReducedSpace space;
  space.config = {ReductionMethod::RandPix, t, seed};
  space.input_dim = train.cols();
  space.input_shape = train.shape();
  Rng rng(seed);
  space.pixel_indices = sample_without_replacement(train.cols(), k, rng);
  std::sort(space.pixel_indices.begin(), space.pixel_indices.end());
  return space;
}

ReducedSpace sample_set(const Dataset& train, std::size_t t, std::uint64_t seed) {
  require_t(t);
  const std::size_t k = reduced_count(train.rows(), t, "row");
  ReducedSpace space;
  space.config = {ReductionMethod::RandSet, t, seed};
  space.input_dim = train.cols();
  space.input_shape = train.shape();
  Rng rng(seed);
  auto rows = sample_without_replacement(train.rows(), k, rng);
  std::sort(rows.begin(), rows.end());
  space.reduced_set = train.subset(rows);
  return space;
}

ReducedSpace build_space(const Dataset& train, const ReductionConfig& config) {
  require_t(config.t);
  switch (config.method) {
    case ReductionMethod::Pool:
    case ReductionMethod::MaxPool:
    case ReductionMethod::Rbi: {
      ReducedSpace space;
      space.config = config;
      space.input_dim = train.cols();
      space.input_shape = require_shape(train, to_string(config.method));
      // Validate geometry once up front.
      if (config.method == ReductionMethod::Rbi) {
        resize_bilinear(train.subset(std::vector<std::size_t>{}), config.t);
      } else {
        pool(train.subset(std::vector<std::size_t>{}), config.t, PoolFn::Avg);
      }
      return space;
    }
    case ReductionMethod::Pca: {
      auto space = pca_fit(train, config.t);
      space.config.seed = config.seed;
      return space;
    }
    case ReductionMethod::RandPix: return sample_pixels(train, config.t, config.seed);
    case ReductionMethod::KMeans: return kmeans_reduce(train, config.t, config.seed);
    case ReductionMethod::RandSet: return sample_set(train, config.t, config.seed);
  }
  throw Error(ErrorCode::ConfigError, "unhandled reduction method");
}

std::size_t stored_scalars(const Dataset& ds) noexcept { return ds.rows() * ds.cols(); }

void save_space(const ReducedSpace& space, const std::filesystem::path& path) {
  nlohmann::ordered_json j;
  j["method"] = to_string(space.config.method);
  j["t"] = space.config.t;
  j["seed"] = space.config.seed;
  j["input_dim"] = space.input_dim;
  j["input_shape"] = space.input_shape
                         ? nlohmann::ordered_json::array(
                               {space.input_shape->height, space.input_shape->width, space.input_shape->channels})
                         : nlohmann::ordered_json(nullptr);
  j["output_dim"] = space.output_dim();
  if (space.config.method == ReductionMethod::RandPix) j["pixel_indices"] = space.pixel_indices;
  if (space.config.method == ReductionMethod::Pca) {
    const auto blob_path = sibling(path, ".bin");
    std::string blob;
    blob.reserve(4 * (space.pca_mean.size() + space.pca_basis.size()));
    for (float f : space.pca_mean) put_f32(blob, f);
    for (float f : space.pca_basis) put_f32(blob, f);
    write_text_file(blob_path, blob);
    j["blob"] = {{"file", blob_path.filename().string()},
                 {"mean", {{"offset", 0}, {"count", space.pca_mean.size()}}},
                 {"basis", {{"offset", 4 * space.pca_mean.size()}, {"count", space.pca_basis.size()}}}};
  }
  if (space.reduced_set) {
    const auto set_path = sibling(path, ".set.bin");
    save_dataset(*space.reduced_set, set_path, DataFormat::Binary);
    j["reduced_set"] = set_path.filename().string();
  }
  write_text_file(path, j.dump(2) + "\n");
}

ReducedSpace load_space(const std::filesystem::path& path) {
  try {
    const auto j = nlohmann::json::parse(read_text_file(path));
    ReducedSpace space;
    space.config.method = parse_reduction_method(j.at("method").get<std::string>());
    space.config.t = j.at("t").get<std::size_t>();
    space.config.seed = j.at("seed").get<std::uint64_t>();
    space.input_dim = j.at("input_dim").get<std::size_t>();
    if (!j.at("input_shape").is_null()) {
      const auto& s = j.at("input_shape");
      space.input_shape = ImageShape{s.at(0).get<std::size_t>(), s.at(1).get<std::size_t>(), s.at(2).get<std::size_t>()};
    }
    if (j.contains("pixel_indices")) space.pixel_indices = j.at("pixel_indices").get<std::vector<std::size_t>>();
    if (j.contains("blob")) {
      const auto& b = j.at("blob");
      const auto bytes = read_text_file(path.parent_path() / b.at("file").get<std::string>());
      auto read_block = [&](const nlohmann::json& spec) {
        const auto offset = spec.at("offset").get<std::size_t>();
        const auto count = spec.at("count").get<std::size_t>();
        if (offset + 4 * count > bytes.size()) throw Error(ErrorCode::ParseError, "reduced-space blob is truncated");
        std::vector<float> out(count);
        for (std::size_t i = 0; i < count; ++i) out[i] = get_f32(bytes, offset + 4 * i);
        return out;
      };
      space.pca_mean = read_block(b.at("mean"));
      space.pca_basis = read_block(b.at("basis"));
    }
    if (j.contains("reduced_set")) {
      auto set = load_dataset(path.parent_path() / j.at("reduced_set").get<std::string>(), DataFormat::Binary);
      if (space.input_shape) set = Dataset(set.cols(), set.features(), set.labels(), space.input_shape);
      space.reduced_set = std::move(set);
    }
    return space;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
}

}  // namespace geosep
