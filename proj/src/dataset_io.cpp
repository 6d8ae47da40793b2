#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "geosep/core.hpp"
#include "geosep/error.hpp"
#include "csv_util.hpp"

namespace geosep {
namespace {

using namespace csv;

constexpr std::array<char, 4> kMagic = {'G', 'S', 'E', 'P'};
constexpr std::uint16_t kVersion = 1;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::IoError, "short write to " + path.string());
}

Label parse_label(std::string_view field, std::size_t line_no) {
  if (!field.empty() && field.front() == '-') {
    throw Error(ErrorCode::ParseError, where(line_no) + "negative label '" + std::string(field) + "'");
  }
  const auto wide = parse_number<std::uint64_t>(field, line_no, "label");
  if (wide > std::numeric_limits<Label>::max()) {
    throw Error(ErrorCode::ParseError, where(line_no) + "label " + std::string(field) + " exceeds 2^32-1");
  }
  return static_cast<Label>(wide);
}

void put_u16(std::string& out, std::uint16_t v) {
  for (int i = 0; i < 2; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}
void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}
void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint64_t get_le(std::string_view bytes, std::size_t offset, int width) {
  std::uint64_t v = 0;
  for (int i = 0; i < width; ++i) {
    v |= std::uint64_t{static_cast<unsigned char>(bytes[offset + static_cast<std::size_t>(i)])} << (8 * i);
  }
  return v;
}

Dataset parse_binary_dataset(std::string_view bytes) {
  constexpr std::size_t header = 4 + 2 + 8 + 8;
  if (bytes.size() < header || !std::equal(kMagic.begin(), kMagic.end(), bytes.begin())) {
    throw Error(ErrorCode::ParseError, "missing GSEP magic");
  }
  const auto version = get_le(bytes, 4, 2);
  if (version != kVersion) {
    throw Error(ErrorCode::ParseError, "unsupported binary version " + std::to_string(version));
  }
  const std::uint64_t n = get_le(bytes, 6, 8);
  const std::uint64_t d = get_le(bytes, 14, 8);
  if (n == 0) throw Error(ErrorCode::ParseError, "binary dataset has n=0");
  if (d == 0) throw Error(ErrorCode::ParseError, "binary dataset has d=0");
  // Overflow-safe check that the payload is exactly n*4 + n*d*4 bytes.
  const std::uint64_t payload = bytes.size() - header;
  if (n > payload / 4 || d > (payload / 4 - n) / n || (n + n * d) * 4 != payload) {
    throw Error(ErrorCode::ParseError, "binary payload size does not match n=" + std::to_string(n) +
                                           ", d=" + std::to_string(d));
  }
  std::vector<Label> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<Label>(get_le(bytes, header + 4 * i, 4));
  std::vector<float> feats(n * d);
  const std::size_t base = header + 4 * n;
  for (std::size_t i = 0; i < feats.size(); ++i) {
    const auto bits = static_cast<std::uint32_t>(get_le(bytes, base + 4 * i, 4));
    std::memcpy(&feats[i], &bits, sizeof(float));
  }
  return Dataset(d, std::move(feats), std::move(labels));
}

std::string format_binary_dataset(const Dataset& ds) {
  std::string out;
  out.reserve(22 + ds.rows() * 4 * (1 + ds.cols()));
  out.append(kMagic.data(), kMagic.size());
  put_u16(out, kVersion);
  put_u64(out, ds.rows());
  put_u64(out, ds.cols());
  for (Label l : ds.labels()) put_u32(out, l);
  for (float f : ds.features()) {
    std::uint32_t bits = 0;
    std::memcpy(&bits, &f, sizeof(float));
    put_u32(out, bits);
  }
  return out;
}

std::optional<ImageShape> read_meta(const std::filesystem::path& data_path) {
  const auto meta = meta_path_for(data_path);
  if (!std::filesystem::exists(meta)) return std::nullopt;
  try {
    const auto j = nlohmann::json::parse(read_file(meta));
    if (!j.contains("shape")) return std::nullopt;
    const auto& s = j.at("shape");
    if (!s.is_array() || s.size() != 3) throw Error(ErrorCode::ParseError, meta.string() + ": shape must be [h,w,c]");
    return ImageShape{s[0].get<std::size_t>(), s[1].get<std::size_t>(), s[2].get<std::size_t>()};
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, meta.string() + ": " + e.what());
  }
}

void write_meta(const Dataset& ds, const std::filesystem::path& data_path) {
  const auto meta = meta_path_for(data_path);
  if (!ds.shape()) {
    std::error_code ec;
    std::filesystem::remove(meta, ec);
    return;
  }
  nlohmann::json j;
  j["shape"] = {ds.shape()->height, ds.shape()->width, ds.shape()->channels};
  write_file(meta, j.dump() + "\n");
}

Dataset normalized(const Dataset& ds) {
  const std::size_t d = ds.cols();
  std::vector<float> lo(d, std::numeric_limits<float>::infinity());
  std::vector<float> hi(d, -std::numeric_limits<float>::infinity());
  for (std::size_t i = 0; i < ds.rows(); ++i) {
    auto r = ds.row(i);
    for (std::size_t j = 0; j < d; ++j) {
      lo[j] = std::min(lo[j], r[j]);
      hi[j] = std::max(hi[j], r[j]);
    }
  }
  std::vector<float> feats(ds.features());
  for (std::size_t i = 0; i < ds.rows(); ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      float& v = feats[i * d + j];
      const double span = static_cast<double>(hi[j]) - lo[j];
      v = span > 0 ? static_cast<float>((static_cast<double>(v) - lo[j]) / span) : 0.0f;
    }
  }
  return Dataset(d, std::move(feats), ds.labels(), ds.shape());
}

}  // namespace

std::string read_text_file(const std::filesystem::path& path) { return read_file(path); }

void write_text_file(const std::filesystem::path& path, std::string_view bytes) { write_file(path, bytes); }

std::string format_real(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  const int len = std::snprintf(buf.data(), buf.size(), "%.9g", value);
  return std::string(buf.data(), static_cast<std::size_t>(len));
}

std::filesystem::path meta_path_for(const std::filesystem::path& path) {
  auto meta = path;
  meta.replace_extension();
  meta += ".meta.json";
  return meta;
}

DataFormat format_for_path(const std::filesystem::path& path) noexcept {
  return path.extension() == ".csv" ? DataFormat::Csv : DataFormat::Binary;
}

Dataset parse_csv_dataset(std::string_view text) {
  const auto lines = split_lines(text);
  if (lines.empty()) throw Error(ErrorCode::ParseError, "empty CSV");
  const auto header = split_fields(lines[0]);
  if (header.size() < 2 || header[0] != "label") {
    throw Error(ErrorCode::ParseError, "header must be 'label,f0,...,f{d-1}'");
  }
  const std::size_t d = header.size() - 1;
  if (lines.size() < 2) throw Error(ErrorCode::ParseError, "dataset has no rows");
  std::vector<float> feats;
  feats.reserve((lines.size() - 1) * d);
  std::vector<Label> labels;
  labels.reserve(lines.size() - 1);
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const auto fields = split_fields(lines[li]);
    if (fields.size() != d + 1) {
      throw Error(ErrorCode::ParseError, where(li + 1) + "expected " + std::to_string(d + 1) + " fields, got " +
                                             std::to_string(fields.size()));
    }
    labels.push_back(parse_label(fields[0], li + 1));
    for (std::size_t j = 1; j <= d; ++j) feats.push_back(parse_number<float>(fields[j], li + 1, "feature"));
  }
  return Dataset(d, std::move(feats), std::move(labels));
}

std::string format_csv_dataset(const Dataset& ds) {
  std::string out = "label";
  for (std::size_t j = 0; j < ds.cols(); ++j) out += ",f" + std::to_string(j);
  out += '\n';
  for (std::size_t i = 0; i < ds.rows(); ++i) {
    out += std::to_string(ds.label(i));
    for (float v : ds.row(i)) {
      out += ',';
      out += format_real(v);
    }
    out += '\n';
  }
  return out;
}

Dataset load_dataset(const std::filesystem::path& path, DataFormat format, LoadOptions opts) {
  const auto bytes = read_file(path);
  Dataset ds = format == DataFormat::Csv ? parse_csv_dataset(bytes) : parse_binary_dataset(bytes);
  if (auto shape = read_meta(path)) ds = Dataset(ds.cols(), ds.features(), ds.labels(), shape);
  return opts.normalize ? normalized(ds) : ds;
}

Dataset load_dataset(const std::filesystem::path& path, LoadOptions opts) {
  return load_dataset(path, format_for_path(path), opts);
}

void save_dataset(const Dataset& ds, const std::filesystem::path& path, DataFormat format) {
  if (ds.rows() == 0) throw Error(ErrorCode::EmptyInput, "refusing to write an empty dataset to " + path.string());
  write_file(path, format == DataFormat::Csv ? format_csv_dataset(ds) : format_binary_dataset(ds));
  write_meta(ds, path);
}

void save_dataset(const Dataset& ds, const std::filesystem::path& path) {
  save_dataset(ds, path, format_for_path(path));
}

std::vector<PredictionRecord> parse_predictions(std::string_view text) {
  const auto lines = split_lines(text);
  if (lines.empty()) throw Error(ErrorCode::ParseError, "empty prediction file");
  const auto header = split_fields(lines[0]);
  if (header.size() != 3 || header[0] != "index" || header[1] != "predicted_label" ||
      header[2] != "model_confidence") {
    throw Error(ErrorCode::ParseError, "header must be 'index,predicted_label,model_confidence'");
  }
  std::vector<PredictionRecord> preds;
  preds.reserve(lines.size() - 1);
  std::unordered_set<std::size_t> seen;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const auto fields = split_fields(lines[li]);
    if (fields.size() != 3) {
      throw Error(ErrorCode::ParseError, where(li + 1) + "expected 3 fields, got " + std::to_string(fields.size()));
    }
    PredictionRecord rec;
    rec.index = parse_number<std::size_t>(fields[0], li + 1, "index");
    rec.predicted_label = parse_label(fields[1], li + 1);
    if (!fields[2].empty()) {
      const double c = parse_number<double>(fields[2], li + 1, "model_confidence");
      if (!(c >= 0.0 && c <= 1.0)) {
        throw Error(ErrorCode::ParseError, where(li + 1) + "model_confidence outside [0,1]");
      }
      rec.model_confidence = c;
    }
    if (!seen.insert(rec.index).second) {
      throw Error(ErrorCode::ParseError, where(li + 1) + "duplicate index " + std::to_string(rec.index));
    }
    preds.push_back(rec);
  }
  return preds;
}

std::string format_predictions(std::span<const PredictionRecord> preds) {
  std::string out = "index,predicted_label,model_confidence\n";
  for (const auto& p : preds) {
    out += std::to_string(p.index) + ',' + std::to_string(p.predicted_label) + ',';
    if (p.model_confidence) out += format_real(*p.model_confidence);
    out += '\n';
  }
  return out;
}

std::vector<PredictionRecord> load_predictions(const std::filesystem::path& path) {
  return parse_predictions(read_file(path));
}

void save_predictions(std::span<const PredictionRecord> preds, const std::filesystem::path& path) {
  write_file(path, format_predictions(preds));
}

}  // namespace geosep
