#include <chrono>
#include <map>

#include "geosep/cli.hpp"
#include "geosep/error.hpp"
#include "geosep/parallel.hpp"

namespace geosep::cli {
namespace {

using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

// One query: map into the reduced space, then fast separation against the
// reduced train set with the query's own label as the prediction.
double score_query(const ReducedSpace& space, const Dataset& rtrain, const Dataset& queries, std::size_t i,
                   MetricKind metric) {
  const auto x = space.map_row(queries.row(i));
  return fast_separation(x, rtrain, queries.label(i), metric).value;
}

}  // namespace

std::string bench_methodology() {
  return "Wall-clock (steady_clock) time to map every query into the reduced space and compute its fast separation "
         "against the reduced train set. Reduced-space fitting is excluded. Each setting first scores a warmup batch "
         "of queries untimed, then runs the full query set once per repetition; throughput is queries divided by "
         "elapsed seconds. The interval is mean +/- 1.96 sample sd / sqrt(repetitions).";
}

std::vector<BenchResult> run_bench(const Dataset& train, const Dataset& queries, const std::vector<BenchSetting>& settings,
                                   MetricKind metric, std::size_t workers, std::size_t reps, std::size_t warmup,
                                   std::uint64_t seed) {
  if (queries.rows() == 0) throw Error(ErrorCode::ParameterError, "bench needs at least one query");
  if (reps == 0) throw Error(ErrorCode::ParameterError, "bench needs at least one repetition");
  if (settings.empty()) throw Error(ErrorCode::ParameterError, "bench needs at least one setting");
  if (queries.cols() != train.cols()) throw Error(ErrorCode::DimensionError, "queries and train differ in dimension");
  std::vector<BenchResult> results;
  for (const auto& setting : settings) {
    const auto space = build_space(train, ReductionConfig{setting.method, setting.t, seed});
    const auto rtrain = space.reduce_train(train);
    BenchResult res;
    res.setting = setting;
    res.train_rows = rtrain.rows();
    res.dim = rtrain.cols();

    volatile double sink = 0.0;
    for (std::size_t i = 0; i < std::min(warmup, queries.rows()); ++i) sink = sink + score_query(space, rtrain, queries, i, metric);

    std::vector<double> out(queries.rows());
    for (std::size_t r = 0; r < reps; ++r) {
      const auto start = Clock::now();
      parallel_for(queries.rows(), workers, [&](std::size_t i) { out[i] = score_query(space, rtrain, queries, i, metric); });
      const double secs = std::chrono::duration<double>(Clock::now() - start).count();
      sink = sink + out.front();
      res.qps.push_back(static_cast<double>(queries.rows()) / std::max(secs, 1e-9));
    }
    res.interval = mean_interval(res.qps);
    results.push_back(std::move(res));
  }
  return results;
}

nlohmann::ordered_json cmd_bench(const RunConfig& cfg) {
  validate(cfg);
  if (cfg.train.empty()) throw Error(ErrorCode::ConfigError, "--train is required");
  if (cfg.queries.empty()) throw Error(ErrorCode::ConfigError, "--queries is required");
  const auto load = [&](const std::filesystem::path& p) {
    auto ds = load_dataset(p, LoadOptions{cfg.normalize});
    if (cfg.grayscale) ds = grayscale(ds);
    return ds;
  };
  const auto train = stage("load", [&] { return load(cfg.train); });
  const auto queries = stage("load", [&] { return load(cfg.queries); });
  const auto method = cfg.reduce.value_or(ReductionMethod::Pool);
  std::vector<BenchSetting> settings;
  for (auto t : cfg.t) settings.push_back({method, t});
  const std::size_t workers = resolve_workers(cfg.workers);
  const auto results =
      stage("bench", [&] { return run_bench(train, queries, settings, cfg.metric, workers, cfg.reps, cfg.warmup, cfg.seed); });

  json rows = json::array();
  std::map<std::size_t, double> by_t;
  for (const auto& r : results) {
    rows.push_back({{"method", to_string(r.setting.method)},
                    {"t", r.setting.t},
                    {"train_rows", r.train_rows},
                    {"dim", r.dim},
                    {"qps", r.qps},
                    {"mean_qps", r.interval.mean},
                    {"half_width", r.interval.half_width}});
    by_t[r.setting.t] = r.interval.mean;
  }
  bool monotone = true;
  double prev = -1.0;
  for (const auto& [t, q] : by_t) {
    if (!(q > prev)) monotone = false;
    prev = q;
  }
  json j;
  j["command"] = "bench";
  j["config"] = config_json(cfg);
  j["methodology"] = bench_methodology();
  j["workers"] = workers;
  j["reps"] = cfg.reps;
  j["warmup"] = cfg.warmup;
  j["n_train"] = train.rows();
  j["n_queries"] = queries.rows();
  j["results"] = std::move(rows);
  j["monotone_speedup"] = monotone;
  if (!cfg.out.empty()) write_json(cfg.out / "bench.json", j);
  return j;
}

}  // namespace geosep::cli
