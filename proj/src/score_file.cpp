#include <string>

#include "csv_util.hpp"
#include "geosep/separation.hpp"

namespace geosep {

namespace {

constexpr std::string_view kHeader =
    "index,predicted_label,true_label,correct,separation,is_safe,d_same,d_other,mode,metric";

}  // namespace

std::string format_scores(std::span<const ScoreRow> rows, MetricKind metric) {
  std::string out(kHeader);
  out += '\n';
  for (const auto& r : rows) {
    out += std::to_string(r.index) + ',' + std::to_string(r.predicted_label) + ',' + std::to_string(r.true_label) +
           ',' + (r.correct ? "1" : "0") + ',';
    if (r.score) {
      out += format_real(r.score->value) + ',' + (r.score->is_safe ? "1" : "0") + ',' +
             format_real(r.score->d_same) + ',' + format_real(r.score->d_other) + ',' +
             std::string(to_string(r.score->mode));
    } else {
      out += ",,,,";
    }
    out += ',';
    out += to_string(metric);
    out += '\n';
  }
  return out;
}

std::vector<ScoreRow> parse_scores(std::string_view text) {
  using namespace csv;
  const auto lines = split_lines(text);
  if (lines.empty() || trim(lines[0]) != kHeader) {
    throw Error(ErrorCode::ParseError, "score file header must be '" + std::string(kHeader) + "'");
  }
  std::vector<ScoreRow> rows;
  rows.reserve(lines.size() - 1);
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const auto f = split_fields(lines[li]);
    if (f.size() != 10) {
      throw Error(ErrorCode::ParseError, where(li + 1) + "expected 10 fields, got " + std::to_string(f.size()));
    }
    ScoreRow r;
    r.index = parse_number<std::size_t>(f[0], li + 1, "index");
    r.predicted_label = parse_number<Label>(f[1], li + 1, "predicted_label");
    r.true_label = parse_number<Label>(f[2], li + 1, "true_label");
    r.correct = parse_number<int>(f[3], li + 1, "correct") != 0;
    if (!f[4].empty()) {
      SeparationScore s;
      s.value = parse_number<double>(f[4], li + 1, "separation");
      s.is_safe = parse_number<int>(f[5], li + 1, "is_safe") != 0;
      s.d_same = parse_number<double>(f[6], li + 1, "d_same");
      s.d_other = parse_number<double>(f[7], li + 1, "d_other");
      s.mode = parse_mode(f[8]);
      r.score = s;
    } else {
      r.error = "missing score";
    }
    parse_metric(f[9]);
    rows.push_back(std::move(r));
  }
  return rows;
}

void save_scores(std::span<const ScoreRow> rows, MetricKind metric, const std::filesystem::path& path) {
  write_text_file(path, format_scores(rows, metric));
}

std::vector<ScoreRow> load_scores(const std::filesystem::path& path) { return parse_scores(read_text_file(path)); }

}  // namespace geosep
