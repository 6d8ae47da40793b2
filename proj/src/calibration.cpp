#include "geosep/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "geosep/core.hpp"
#include "geosep/error.hpp"

namespace geosep {
namespace {

double logistic(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// Merges neighbours with identical scores; input sorted by score.
std::vector<FitPair> merge_equal_scores(std::vector<FitPair> pairs) {
  std::vector<FitPair> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) {
    if (!out.empty() && out.back().score == p.score) {
      auto& q = out.back();
      const double w = q.weight + p.weight;
      q.accuracy = (q.accuracy * q.weight + p.accuracy * p.weight) / w;
      q.weight = w;
    } else {
      out.push_back(p);
    }
  }
  return out;
}

}  // namespace

std::string_view to_string(CurveKind kind) noexcept { return kind == CurveKind::Sigmoid ? "sigmoid" : "isotonic"; }

CurveKind parse_curve_kind(std::string_view text) {
  if (text == "isotonic") return CurveKind::Isotonic;
  if (text == "sigmoid") return CurveKind::Sigmoid;
  throw Error(ErrorCode::ConfigError, "unknown curve '" + std::string(text) + "' (expected isotonic or sigmoid)");
}

std::vector<FitPair> bin_scores(std::span<const double> scores, const std::vector<bool>& correct,
                                std::size_t n_bins) {
  const std::size_t n = scores.size();
  if (n == 0) throw Error(ErrorCode::EmptyInput, "no scores to bin");
  if (correct.size() != n) {
    throw Error(ErrorCode::DimensionError, std::to_string(n) + " scores but " + std::to_string(correct.size()) +
                                               " correctness flags");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  std::vector<FitPair> pairs;
  auto emit = [&](std::size_t begin, std::size_t end) {
    double sum = 0.0;
    double hits = 0.0;
    for (std::size_t k = begin; k < end; ++k) {
      sum += scores[order[k]];
      hits += correct[order[k]] ? 1.0 : 0.0;
    }
    const double w = static_cast<double>(end - begin);
    pairs.push_back({sum / w, hits / w, w});
  };

  if (n_bins == 0) {
    std::size_t begin = 0;
    for (std::size_t k = 1; k <= n; ++k) {
      if (k == n || scores[order[k]] != scores[order[begin]]) {
        emit(begin, k);
        begin = k;
      }
    }
  } else {
    const std::size_t bins = std::min(n_bins, n);
    const std::size_t base = n / bins;
    const std::size_t extra = n % bins;
    std::size_t begin = 0;
    for (std::size_t b = 0; b < bins; ++b) {
      const std::size_t size = base + (b < extra ? 1 : 0);
      emit(begin, begin + size);
      begin += size;
    }
  }
  return merge_equal_scores(std::move(pairs));
}

std::vector<double> pava(std::span<const double> values, std::span<const double> weights) {
  if (values.size() != weights.size()) throw Error(ErrorCode::DimensionError, "values and weights differ in length");
  struct Block {
    double mean;
    double weight;
    std::size_t count;
  };
  std::vector<Block> blocks;
  blocks.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    blocks.push_back({values[i], weights[i], 1});
    while (blocks.size() > 1 && blocks[blocks.size() - 2].mean > blocks.back().mean) {
      const Block top = blocks.back();
      blocks.pop_back();
      Block& prev = blocks.back();
      const double w = prev.weight + top.weight;
      prev.mean = (prev.mean * prev.weight + top.mean * top.weight) / w;
      prev.weight = w;
      prev.count += top.count;
    }
  }
  std::vector<double> fitted;
  fitted.reserve(values.size());
  for (const auto& b : blocks) fitted.insert(fitted.end(), b.count, b.mean);
  return fitted;
}

CalibrationCurve fit_isotonic(std::span<const FitPair> pairs) {
  if (pairs.empty()) throw Error(ErrorCode::EmptyInput, "isotonic fit needs at least one pair");
  std::vector<FitPair> sorted(pairs.begin(), pairs.end());
  std::stable_sort(sorted.begin(), sorted.end(), [](const FitPair& a, const FitPair& b) { return a.score < b.score; });
  sorted = merge_equal_scores(std::move(sorted));

  std::vector<double> values;
  std::vector<double> weights;
  for (const auto& p : sorted) {
    if (!(p.weight > 0)) throw Error(ErrorCode::ParameterError, "fit pair weights must be positive");
    values.push_back(p.accuracy);
    weights.push_back(p.weight);
  }
  const auto fitted = pava(values, weights);
  CalibrationCurve curve;
  curve.kind = CurveKind::Isotonic;
  curve.knots.reserve(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    curve.knots.push_back({sorted[i].score, std::clamp(fitted[i], 0.0, 1.0)});
  }
  return curve;
}

CalibrationCurve fit_sigmoid(std::span<const FitPair> pairs, SigmoidOptions opts) {
  if (pairs.size() < 2) throw Error(ErrorCode::ParameterError, "sigmoid fit needs at least two pairs");
  const bool flat = std::all_of(pairs.begin(), pairs.end(),
                                [&](const FitPair& p) { return p.accuracy == pairs.front().accuracy; });
  if (flat) throw Error(ErrorCode::DegenerateFit, "all accuracies are equal");
  const bool one_score = std::all_of(pairs.begin(), pairs.end(),
                                     [&](const FitPair& p) { return p.score == pairs.front().score; });
  if (one_score) throw Error(ErrorCode::ParameterError, "sigmoid fit needs two distinct scores");

  auto cost = [&](double a, double b) {
    double c = 0.0;
    for (const auto& p : pairs) {
      const double r = logistic(a * p.score + b) - p.accuracy;
      c += p.weight * r * r;
    }
    return c;
  };

  double a = 1.0;
  double b = 0.0;
  double lambda = 1e-3;
  double current = cost(a, b);
  bool converged = false;
  for (int iter = 0; iter < opts.max_iterations && !converged; ++iter) {
    // Normal equations of the weighted Gauss-Newton step.
    double jtj_aa = 0, jtj_ab = 0, jtj_bb = 0, jtr_a = 0, jtr_b = 0;
    for (const auto& p : pairs) {
      const double s = logistic(a * p.score + b);
      const double r = s - p.accuracy;
      const double g = s * (1.0 - s);
      const double ja = g * p.score;
      const double jb = g;
      jtj_aa += p.weight * ja * ja;
      jtj_ab += p.weight * ja * jb;
      jtj_bb += p.weight * jb * jb;
      jtr_a += p.weight * ja * r;
      jtr_b += p.weight * jb * r;
    }
    bool accepted = false;
    double step_norm = 0.0;
    for (int tries = 0; tries < 60 && !accepted; ++tries) {
      const double m_aa = jtj_aa + lambda * (jtj_aa + 1e-12);
      const double m_bb = jtj_bb + lambda * (jtj_bb + 1e-12);
      const double det = m_aa * m_bb - jtj_ab * jtj_ab;
      if (!(std::abs(det) > 0)) {
        lambda *= 10;
        continue;
      }
      const double da = -(m_bb * jtr_a - jtj_ab * jtr_b) / det;
      const double db = -(m_aa * jtr_b - jtj_ab * jtr_a) / det;
      const double trial = cost(a + da, b + db);
      if (trial <= current) {
        a += da;
        b += db;
        step_norm = std::hypot(da, db);
        const double improvement = current - trial;
        current = trial;
        lambda = std::max(lambda / 10, 1e-15);
        accepted = true;
        converged = step_norm < opts.tolerance * (std::hypot(a, b) + opts.tolerance) ||
                    improvement < opts.tolerance * opts.tolerance * (current + opts.tolerance);
      } else {
        lambda *= 10;
      }
    }
    if (!accepted) break;
  }
  if (!std::isfinite(a) || !std::isfinite(b)) throw Error(ErrorCode::NumericError, "sigmoid fit diverged");
  CalibrationCurve curve;
  curve.kind = CurveKind::Sigmoid;
  curve.slope = a;
  curve.intercept = b;
  return curve;
}

CalibrationCurve constant_curve(double probability) {
  CalibrationCurve curve;
  curve.kind = CurveKind::Isotonic;
  curve.knots = {{0.0, std::clamp(probability, 0.0, 1.0)}};
  return curve;
}

CalibrationCurve fit_curve(std::span<const FitPair> pairs, CurveKind kind, bool* degenerate) {
  if (degenerate) *degenerate = false;
  if (kind == CurveKind::Isotonic) return fit_isotonic(pairs);
  try {
    return fit_sigmoid(pairs);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DegenerateFit || pairs.empty()) throw;
    if (degenerate) *degenerate = true;
    double w = 0.0, acc = 0.0;
    for (const auto& p : pairs) {
      w += p.weight;
      acc += p.weight * p.accuracy;
    }
    return constant_curve(acc / w);
  }
}

double apply_curve(const CalibrationCurve& curve, double score) {
  if (curve.kind == CurveKind::Sigmoid) return logistic(curve.slope * score + curve.intercept);
  const auto& k = curve.knots;
  if (k.empty()) throw Error(ErrorCode::ParameterError, "isotonic curve has no knots");
  if (std::isnan(score)) return k.front().probability;
  if (score <= k.front().score) return k.front().probability;
  if (score >= k.back().score) return k.back().probability;
  const auto hi = std::upper_bound(k.begin(), k.end(), score, [](double s, const Knot& kn) { return s < kn.score; });
  const auto lo = hi - 1;
  const double t = (score - lo->score) / (hi->score - lo->score);
  return std::clamp(lo->probability + t * (hi->probability - lo->probability), 0.0, 1.0);
}

std::string curve_to_json(const CalibrationCurve& curve) {
  nlohmann::ordered_json j;
  j["kind"] = to_string(curve.kind);
  if (curve.kind == CurveKind::Isotonic) {
    auto knots = nlohmann::ordered_json::array();
    for (const auto& k : curve.knots) knots.push_back({{"s", k.score}, {"p", k.probability}});
    j["knots"] = std::move(knots);
    j["extrapolation"] = "clamp";
  } else {
    j["a"] = curve.slope;
    j["b"] = curve.intercept;
  }
  return j.dump(2) + "\n";
}

CalibrationCurve curve_from_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    CalibrationCurve curve;
    curve.kind = parse_curve_kind(j.at("kind").get<std::string>());
    if (curve.kind == CurveKind::Isotonic) {
      if (j.contains("extrapolation") && j.at("extrapolation") != "clamp") {
        throw Error(ErrorCode::ParseError, "only clamp extrapolation is supported");
      }
      for (const auto& k : j.at("knots")) curve.knots.push_back({k.at("s").get<double>(), k.at("p").get<double>()});
      if (curve.knots.empty()) throw Error(ErrorCode::ParseError, "isotonic curve has no knots");
      for (std::size_t i = 1; i < curve.knots.size(); ++i) {
        if (!(curve.knots[i].score > curve.knots[i - 1].score) ||
            curve.knots[i].probability < curve.knots[i - 1].probability) {
          throw Error(ErrorCode::ParseError, "knots must have increasing scores and non-decreasing probabilities");
        }
      }
    } else {
      curve.slope = j.at("a").get<double>();
      curve.intercept = j.at("b").get<double>();
    }
    return curve;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("curve file: ") + e.what());
  }
}

void save_curve(const CalibrationCurve& curve, const std::filesystem::path& path) {
  write_text_file(path, curve_to_json(curve));
}

CalibrationCurve load_curve(const std::filesystem::path& path) { return curve_from_json(read_text_file(path)); }

}  // namespace geosep
