#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "geosep/baseline.hpp"
#include "geosep/calibration.hpp"
#include "geosep/core.hpp"
#include "geosep/evaluation.hpp"
#include "geosep/reduction.hpp"
#include "geosep/separation.hpp"

namespace geosep::cli {

// Flag values shared by every subcommand. Unused fields keep their defaults.
struct RunConfig {
  std::string command;

  std::filesystem::path data;
  std::filesystem::path train;
  std::filesystem::path queries;
  std::filesystem::path preds;
  std::filesystem::path scores;
  std::filesystem::path curve_file;
  std::filesystem::path baseline_curve;
  std::filesystem::path calibrated;
  std::filesystem::path out;

  MetricKind metric = MetricKind::L2;
  SeparationMode mode = SeparationMode::Fast;
  std::size_t fit_bins = kDefaultFitBins;
  std::size_t ece_bins = kDefaultEceBins;
  CurveKind curve = CurveKind::Isotonic;
  Signal signal = Signal::Separation;

  std::optional<ReductionMethod> reduce;
  std::vector<std::size_t> t = {2};
  std::uint64_t seed = 0;
  std::size_t seeds = 1;  // pipeline: seed, seed+1, ..., seed+seeds-1
  bool grayscale = false;
  bool normalize = false;

  ModelKind model = ModelKind::Centroid;
  std::size_t k = 5;
  double temperature = 1.0;

  std::size_t workers = 0;  // 0: GEOSEP_WORKERS, then hardware concurrency

  std::size_t reps = 5;
  std::size_t warmup = 32;

  // synth
  std::string synth_kind = "blobs";
  std::size_t n = 5000;
  std::size_t dim = 20;
  std::size_t classes = 4;
  double spread = 2.15;
};

// Checks cross-flag invariants before any work starts.
void validate(const RunConfig& cfg);

// Settings that determine results. Worker count is left out so reports do not
// depend on it.
nlohmann::ordered_json config_json(const RunConfig& cfg);

// Each returns the JSON it also writes to cfg.out (when it writes one).
nlohmann::ordered_json cmd_split(const RunConfig& cfg);
nlohmann::ordered_json cmd_reduce(const RunConfig& cfg);
nlohmann::ordered_json cmd_predict(const RunConfig& cfg);
nlohmann::ordered_json cmd_score(const RunConfig& cfg);
nlohmann::ordered_json cmd_fit(const RunConfig& cfg);
nlohmann::ordered_json cmd_calibrate(const RunConfig& cfg);
nlohmann::ordered_json cmd_ece(const RunConfig& cfg);
nlohmann::ordered_json cmd_compare(const RunConfig& cfg);
nlohmann::ordered_json cmd_synth(const RunConfig& cfg);
nlohmann::ordered_json cmd_pipeline(const RunConfig& cfg);
nlohmann::ordered_json cmd_bench(const RunConfig& cfg);

// In-memory bench core, used by cmd_bench and the acceptance suite.
struct BenchSetting {
  ReductionMethod method = ReductionMethod::Pool;
  std::size_t t = 1;
};

struct BenchResult {
  BenchSetting setting;
  std::size_t train_rows = 0;
  std::size_t dim = 0;
  std::vector<double> qps;  // one entry per repetition
  Interval interval;
};

std::vector<BenchResult> run_bench(const Dataset& train, const Dataset& queries, const std::vector<BenchSetting>& settings,
                                   MetricKind metric, std::size_t workers, std::size_t reps, std::size_t warmup,
                                   std::uint64_t seed);

std::string bench_methodology();

// Writes pretty JSON with a trailing newline.
void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& j);

// Runs a stage and prefixes any Error with the stage name, keeping its code.
template <typename Fn>
auto stage(const char* name, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.code(), std::string("stage '") + name + "': " + e.detail());
  }
}

// Exit code for an error category: 2 config, 3 data, 4 numeric.
int exit_code_for(ErrorCode code) noexcept;

}  // namespace geosep::cli
