#include "geosep/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "geosep/error.hpp"

namespace geosep {

std::size_t ece_bin_index(double confidence, std::size_t n_bins) {
  const double M = static_cast<double>(n_bins);
  auto m = static_cast<std::size_t>(std::floor(confidence * M));
  if (m >= n_bins) m = n_bins - 1;
  // floor(c*M) can land one off at an edge; settle against the edges m/M.
  while (m > 0 && confidence < static_cast<double>(m) / M) --m;
  while (m + 1 < n_bins && confidence >= static_cast<double>(m + 1) / M) ++m;
  return m;
}

EceReport ece(std::span<const double> confidences, const std::vector<bool>& correct, std::size_t n_bins) {
  const std::size_t n = confidences.size();
  if (n == 0) throw Error(ErrorCode::EmptyInput, "ECE needs at least one sample");
  if (correct.size() != n) throw Error(ErrorCode::DimensionError, "confidence and correctness lengths differ");
  if (n_bins == 0) throw Error(ErrorCode::ParameterError, "ECE needs at least one bin");

  std::vector<double> conf_sum(n_bins, 0.0);
  std::vector<std::size_t> hits(n_bins, 0);
  EceReport rep;
  rep.n = n;
  rep.n_bins = n_bins;
  rep.bins.resize(n_bins);
  for (std::size_t i = 0; i < n; ++i) {
    const double c = confidences[i];
    if (!(c >= 0.0 && c <= 1.0)) {
      throw Error(ErrorCode::RangeError, "confidence " + format_real(c) + " outside [0,1]");
    }
    const auto m = ece_bin_index(c, n_bins);
    conf_sum[m] += c;
    hits[m] += correct[i] ? 1 : 0;
    ++rep.bins[m].count;
  }
  double total = 0.0;
  for (std::size_t m = 0; m < n_bins; ++m) {
    auto& b = rep.bins[m];
    b.lower = static_cast<double>(m) / static_cast<double>(n_bins);
    b.upper = static_cast<double>(m + 1) / static_cast<double>(n_bins);
    if (b.count == 0) continue;
    const double cnt = static_cast<double>(b.count);
    b.accuracy = static_cast<double>(hits[m]) / cnt;
    b.mean_confidence = conf_sum[m] / cnt;
    total += std::abs(static_cast<double>(hits[m]) - conf_sum[m]);
  }
  // Rounded to 1e-12 points so decimal inputs such as 0.8 give exact
  // decimal answers instead of carrying their binary representation error.
  rep.ece = std::round(100.0 * total / static_cast<double>(n) * 1e12) / 1e12;
  return rep;
}

std::string reliability_table(const EceReport& report) {
  std::string out = "lower,upper,count,accuracy,mean_confidence\n";
  for (const auto& b : report.bins) {
    if (b.count == 0) continue;
    out += format_real(b.lower) + ',' + format_real(b.upper) + ',' + std::to_string(b.count) + ',' +
           format_real(b.accuracy) + ',' + format_real(b.mean_confidence) + '\n';
  }
  return out;
}

nlohmann::ordered_json to_json(const EceReport& report) {
  nlohmann::ordered_json j;
  j["ece"] = report.ece;
  j["n_bins"] = report.n_bins;
  j["n"] = report.n;
  auto bins = nlohmann::ordered_json::array();
  for (const auto& b : report.bins) {
    if (b.count == 0) continue;
    bins.push_back({{"lower", b.lower},
                    {"upper", b.upper},
                    {"count", b.count},
                    {"accuracy", b.accuracy},
                    {"mean_confidence", b.mean_confidence}});
  }
  j["bins"] = std::move(bins);
  return j;
}

Interval mean_interval(std::span<const double> values) {
  Interval iv;
  iv.k = values.size();
  if (values.empty()) return iv;
  double sum = 0.0;
  for (double v : values) sum += v;
  iv.mean = sum / static_cast<double>(iv.k);
  if (iv.k < 2) return iv;
  double ss = 0.0;
  for (double v : values) ss += (v - iv.mean) * (v - iv.mean);
  const double sd = std::sqrt(ss / static_cast<double>(iv.k - 1));
  iv.half_width = 1.96 * sd / std::sqrt(static_cast<double>(iv.k));
  return iv;
}

double relative_improvement(double ours, double competitor) {
  if (competitor == 0.0) return ours == 0.0 ? 0.0 : -std::numeric_limits<double>::infinity();
  return 100.0 * (competitor - ours) / competitor;
}

std::string_view to_string(Signal s) noexcept {
  return s == Signal::ModelConfidence ? "model_confidence" : "separation";
}

Signal parse_signal(std::string_view text) {
  if (text == "separation") return Signal::Separation;
  if (text == "model_confidence") return Signal::ModelConfidence;
  throw Error(ErrorCode::ConfigError,
              "unknown signal '" + std::string(text) + "' (expected separation or model_confidence)");
}

std::vector<double> signal_values(std::span<const ScoreRow> rows, std::span<const PredictionRecord> preds,
                                  Signal signal) {
  std::vector<double> out;
  out.reserve(rows.size());
  if (signal == Signal::Separation) {
    for (const auto& r : rows) {
      if (!r.score) throw Error(ErrorCode::MissingSignal, "row " + std::to_string(r.index) + " has no separation");
      out.push_back(r.score->value);
    }
    return out;
  }
  std::unordered_map<std::size_t, const PredictionRecord*> by_index;
  for (const auto& p : preds) by_index.emplace(p.index, &p);
  for (const auto& r : rows) {
    const auto it = by_index.find(r.index);
    if (it == by_index.end() || !it->second->model_confidence) {
      throw Error(ErrorCode::MissingSignal, "no model_confidence for query " + std::to_string(r.index));
    }
    out.push_back(*it->second->model_confidence);
  }
  return out;
}

Comparison compare_signals(std::span<const ScoreRow> test_scores, std::span<const PredictionRecord> test_preds,
                           std::span<const NamedCurve> curves, std::size_t n_bins) {
  if (curves.empty()) throw Error(ErrorCode::ParameterError, "nothing to compare");
  std::vector<ScoreRow> rows;
  for (const auto& r : test_scores) {
    if (r.score) rows.push_back(r);
  }
  if (rows.empty()) throw Error(ErrorCode::EmptyInput, "no scored test rows");
  std::vector<bool> correct;
  correct.reserve(rows.size());
  for (const auto& r : rows) correct.push_back(r.correct);

  Comparison cmp;
  for (const auto& nc : curves) {
    const auto raw = signal_values(rows, test_preds, nc.signal);
    std::vector<double> conf(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) conf[i] = apply_curve(nc.curve, raw[i]);
    cmp.signals.push_back({nc.name, nc.signal, ece(conf, correct, n_bins)});
  }
  for (const auto& s : cmp.signals) {
    cmp.improvement_percent.push_back(relative_improvement(cmp.signals.front().report.ece, s.report.ece));
  }
  return cmp;
}

}  // namespace geosep
