#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace geosep {

// One point of the score -> accuracy relation measured on a validation split.
struct FitPair {
  double score = 0.0;
  double accuracy = 0.0;
  double weight = 1.0;

  friend bool operator==(const FitPair&, const FitPair&) = default;
};

enum class CurveKind { Isotonic, Sigmoid };

std::string_view to_string(CurveKind kind) noexcept;
CurveKind parse_curve_kind(std::string_view text);

struct Knot {
  double score = 0.0;
  double probability = 0.0;

  friend bool operator==(const Knot&, const Knot&) = default;
};

// Isotonic curves interpolate linearly between knots and clamp to the end
// knots outside their range. Sigmoid curves evaluate 1/(1+exp(-(a*s+b))).
struct CalibrationCurve {
  CurveKind kind = CurveKind::Isotonic;
  std::vector<Knot> knots;
  double slope = 0.0;      // a
  double intercept = 0.0;  // b

  friend bool operator==(const CalibrationCurve&, const CalibrationCurve&) = default;
};

inline constexpr std::size_t kDefaultFitBins = 50;

// Groups (score, correct) samples into `n_bins` equal-frequency bins over the
// sorted scores (sizes differ by at most one; bins never exceed the sample
// count). n_bins == 0 makes one group per distinct score instead. Groups
// whose mean scores coincide are merged by weight.
std::vector<FitPair> bin_scores(std::span<const double> scores, const std::vector<bool>& correct,
                                std::size_t n_bins = kDefaultFitBins);

// Weighted pool-adjacent-violators: the least-squares non-decreasing fit.
std::vector<double> pava(std::span<const double> values, std::span<const double> weights);

CalibrationCurve fit_isotonic(std::span<const FitPair> pairs);

struct SigmoidOptions {
  int max_iterations = 500;
  double tolerance = 1e-8;
};

// Weighted least-squares logistic fit from (a, b) = (1, 0) by
// Levenberg-Marquardt. Throws DegenerateFit when every accuracy is equal.
CalibrationCurve fit_sigmoid(std::span<const FitPair> pairs, SigmoidOptions opts = {});

// Flat curve; the fallback for degenerate sigmoid fits.
CalibrationCurve constant_curve(double probability);

// fit_isotonic / fit_sigmoid by kind, with the constant-curve fallback on
// DegenerateFit. `degenerate` (optional) reports whether it was taken.
CalibrationCurve fit_curve(std::span<const FitPair> pairs, CurveKind kind, bool* degenerate = nullptr);

double apply_curve(const CalibrationCurve& curve, double score);

std::string curve_to_json(const CalibrationCurve& curve);
CalibrationCurve curve_from_json(std::string_view text);
void save_curve(const CalibrationCurve& curve, const std::filesystem::path& path);
CalibrationCurve load_curve(const std::filesystem::path& path);

}  // namespace geosep
