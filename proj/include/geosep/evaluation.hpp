#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "geosep/calibration.hpp"
#include "geosep/core.hpp"
#include "geosep/separation.hpp"

namespace geosep {

inline constexpr std::size_t kDefaultEceBins = 15;

struct ReliabilityBin {
  double lower = 0.0;
  double upper = 0.0;
  std::size_t count = 0;
  double accuracy = 0.0;
  double mean_confidence = 0.0;
};

// Expected calibration error in percent over M equal-width confidence bins.
// Bin m covers [m/M, (m+1)/M); the last bin also takes confidence 1.0.
// The value is rounded to 1e-12 percentage points.
struct EceReport {
  double ece = 0.0;
  std::size_t n_bins = 0;
  std::vector<ReliabilityBin> bins;  // all M bins, empty ones included
  std::size_t n = 0;
};

EceReport ece(std::span<const double> confidences, const std::vector<bool>& correct,
              std::size_t n_bins = kDefaultEceBins);

// Bin index of a confidence under the convention above.
std::size_t ece_bin_index(double confidence, std::size_t n_bins);

// CSV "lower,upper,count,accuracy,mean_confidence", non-empty bins only.
std::string reliability_table(const EceReport& report);

nlohmann::ordered_json to_json(const EceReport& report);

// Mean with the half-width of a 95% normal-approximation interval
// (1.96 * sample sd / sqrt(k)); zero half-width for k = 1.
struct Interval {
  double mean = 0.0;
  double half_width = 0.0;
  std::size_t k = 0;
};

Interval mean_interval(std::span<const double> values);

// (competitor - ours) / competitor, in percent.
double relative_improvement(double ours, double competitor);

enum class Signal { Separation, ModelConfidence };

std::string_view to_string(Signal s) noexcept;
Signal parse_signal(std::string_view text);

// Raw signal values for the scored rows, aligned with `rows`. Model
// confidences are looked up by query index in `preds`.
std::vector<double> signal_values(std::span<const ScoreRow> rows, std::span<const PredictionRecord> preds,
                                  Signal signal);

struct NamedCurve {
  std::string name;
  Signal signal = Signal::Separation;
  CalibrationCurve curve;
};

struct SignalEce {
  std::string name;
  Signal signal = Signal::Separation;
  EceReport report;
};

struct Comparison {
  std::vector<SignalEce> signals;
  // improvement_percent[i]: relative_improvement(signals[0], signals[i]).
  std::vector<double> improvement_percent;
};

// Calibrates every named signal on the same test rows (rows whose score
// failed are dropped for all signals) and reports each ECE.
Comparison compare_signals(std::span<const ScoreRow> test_scores, std::span<const PredictionRecord> test_preds,
                           std::span<const NamedCurve> curves, std::size_t n_bins = kDefaultEceBins);

}  // namespace geosep
