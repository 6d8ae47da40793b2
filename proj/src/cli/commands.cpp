#include <algorithm>

#include "../csv_util.hpp"
#include "geosep/cli.hpp"
#include "geosep/error.hpp"
#include "geosep/parallel.hpp"
#include "geosep/synth.hpp"

namespace geosep::cli {
namespace {

using json = nlohmann::ordered_json;

void require(const std::filesystem::path& p, const char* flag) {
  if (p.empty()) throw Error(ErrorCode::ConfigError, std::string(flag) + " is required");
}

Dataset load_input(const std::filesystem::path& path, const RunConfig& cfg) {
  auto ds = load_dataset(path, LoadOptions{cfg.normalize});
  if (cfg.grayscale) ds = grayscale(ds);
  return ds;
}

std::vector<ScoreRow> scored_only(const std::vector<ScoreRow>& rows) {
  std::vector<ScoreRow> out;
  for (const auto& r : rows) {
    if (r.score) out.push_back(r);
  }
  if (out.empty()) throw Error(ErrorCode::EmptyInput, "no successfully scored rows");
  return out;
}

std::vector<PredictionRecord> load_preds_if(const RunConfig& cfg) {
  if (cfg.signal == Signal::ModelConfidence) {
    require(cfg.preds, "--preds");
    return load_predictions(cfg.preds);
  }
  return {};
}

std::vector<bool> correctness(std::span<const ScoreRow> rows) {
  std::vector<bool> c;
  c.reserve(rows.size());
  for (const auto& r : rows) c.push_back(r.correct);
  return c;
}

struct CalibratedRow {
  std::size_t index = 0;
  double confidence = 0.0;
  bool correct = false;
};

std::vector<CalibratedRow> parse_calibrated(std::string_view text) {
  using namespace csv;
  const auto lines = split_lines(text);
  if (lines.empty() || trim(lines[0]) != "index,confidence,correct") {
    throw Error(ErrorCode::ParseError, "calibrated file header must be 'index,confidence,correct'");
  }
  std::vector<CalibratedRow> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto f = split_fields(lines[i]);
    if (f.size() != 3) throw Error(ErrorCode::ParseError, where(i + 1) + "expected 3 fields");
    CalibratedRow r;
    r.index = parse_number<std::size_t>(f[0], i + 1, "index");
    r.confidence = parse_number<double>(f[1], i + 1, "confidence");
    const auto c = parse_number<int>(f[2], i + 1, "correct");
    if (c != 0 && c != 1) throw Error(ErrorCode::ParseError, where(i + 1) + "correct must be 0 or 1");
    r.correct = c == 1;
    rows.push_back(r);
  }
  return rows;
}

json space_summary(const ReducedSpace& space, const Dataset& train, const Dataset& reduced) {
  json j;
  j["method"] = to_string(space.config.method);
  j["t"] = space.config.t;
  j["seed"] = space.config.seed;
  j["input_dim"] = space.input_dim;
  j["output_dim"] = reduced.cols();
  j["train_rows_in"] = train.rows();
  j["train_rows_out"] = reduced.rows();
  j["stored_scalars_in"] = stored_scalars(train);
  j["stored_scalars_out"] = stored_scalars(reduced);
  return j;
}

}  // namespace

void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

int exit_code_for(ErrorCode code) noexcept {
  switch (category_of(code)) {
    case ErrorCategory::Config: return 2;
    case ErrorCategory::Data: return 3;
    case ErrorCategory::Numeric: return 4;
  }
  return 3;
}

void validate(const RunConfig& cfg) {
  if (cfg.mode == SeparationMode::Exact && cfg.metric != MetricKind::L2) {
    throw Error(ErrorCode::ConfigError,
                "exact mode requires --metric l2 (got " + std::string(to_string(cfg.metric)) + ")");
  }
  if (cfg.t.empty()) throw Error(ErrorCode::ConfigError, "--t needs at least one value");
  for (auto t : cfg.t) {
    if (t < 1) throw Error(ErrorCode::ConfigError, "--t must be >= 1");
  }
  if (cfg.ece_bins < 1) throw Error(ErrorCode::ConfigError, "--ece-bins must be >= 1");
  if (cfg.seeds < 1) throw Error(ErrorCode::ConfigError, "--seeds must be >= 1");
  if (cfg.model == ModelKind::Knn && cfg.k % 2 == 0) throw Error(ErrorCode::ConfigError, "--k must be odd");
  if (!(cfg.temperature > 0)) throw Error(ErrorCode::ConfigError, "--temperature must be positive");
}

nlohmann::ordered_json config_json(const RunConfig& cfg) {
  json j;
  j["command"] = cfg.command;
  j["metric"] = to_string(cfg.metric);
  j["mode"] = to_string(cfg.mode);
  j["fit_bins"] = cfg.fit_bins;
  j["ece_bins"] = cfg.ece_bins;
  j["curve"] = to_string(cfg.curve);
  j["reduce"] = cfg.reduce ? json(std::string(to_string(*cfg.reduce))) : json(nullptr);
  j["t"] = cfg.t;
  j["seed"] = cfg.seed;
  j["seeds"] = cfg.seeds;
  j["grayscale"] = cfg.grayscale;
  j["normalize"] = cfg.normalize;
  j["model"] = to_string(cfg.model);
  j["k"] = cfg.k;
  j["temperature"] = cfg.temperature;
  auto path_or_null = [](const std::filesystem::path& p) { return p.empty() ? json(nullptr) : json(p.generic_string()); };
  j["data"] = path_or_null(cfg.data);
  j["train"] = path_or_null(cfg.train);
  j["queries"] = path_or_null(cfg.queries);
  j["preds"] = path_or_null(cfg.preds);
  return j;
}

nlohmann::ordered_json cmd_split(const RunConfig& cfg) {
  require(cfg.data, "--data");
  require(cfg.out, "--out");
  const auto ds = load_input(cfg.data, cfg);
  const auto idx = split_indices(ds.rows(), SplitSpec{cfg.seed});
  const auto format = format_for_path(cfg.data);
  const std::string ext = format == DataFormat::Csv ? ".csv" : ".bin";
  save_dataset(ds.subset(idx.train), cfg.out / ("train" + ext), format);
  save_dataset(ds.subset(idx.val), cfg.out / ("val" + ext), format);
  save_dataset(ds.subset(idx.test), cfg.out / ("test" + ext), format);
  json j;
  j["seed"] = cfg.seed;
  j["n"] = ds.rows();
  j["train"] = idx.train;
  j["val"] = idx.val;
  j["test"] = idx.test;
  write_json(cfg.out / "split.json", j);
  return j;
}

nlohmann::ordered_json cmd_reduce(const RunConfig& cfg) {
  require(cfg.train, "--train");
  require(cfg.out, "--out");
  if (!cfg.reduce) throw Error(ErrorCode::ConfigError, "--reduce is required");
  const auto train = load_input(cfg.train, cfg);
  const auto space = build_space(train, ReductionConfig{*cfg.reduce, cfg.t.front(), cfg.seed});
  const auto reduced = space.reduce_train(train);
  save_space(space, cfg.out / "space.json");
  save_dataset(reduced, cfg.out / "train_reduced.bin", DataFormat::Binary);
  if (!cfg.queries.empty()) {
    save_dataset(space.map(load_input(cfg.queries, cfg)), cfg.out / "queries_reduced.bin", DataFormat::Binary);
  }
  auto j = space_summary(space, train, reduced);
  write_json(cfg.out / "reduce.json", j);
  return j;
}

nlohmann::ordered_json cmd_predict(const RunConfig& cfg) {
  require(cfg.train, "--train");
  require(cfg.queries, "--queries");
  require(cfg.out, "--out");
  const auto train = load_input(cfg.train, cfg);
  const auto queries = load_input(cfg.queries, cfg);
  const auto preds =
      predict_all(train, queries, ModelOptions{cfg.model, cfg.temperature, cfg.k, resolve_workers(cfg.workers)});
  save_predictions(preds, cfg.out / "preds.csv");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) hits += preds[i].predicted_label == queries.label(i) ? 1 : 0;
  json j;
  j["model"] = to_string(cfg.model);
  j["n"] = preds.size();
  j["accuracy"] = preds.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(preds.size());
  return j;
}

nlohmann::ordered_json cmd_score(const RunConfig& cfg) {
  validate(cfg);
  require(cfg.train, "--train");
  require(cfg.queries, "--queries");
  require(cfg.preds, "--preds");
  require(cfg.out, "--out");
  const auto train = load_input(cfg.train, cfg);
  const auto queries = load_input(cfg.queries, cfg);
  const auto preds = load_predictions(cfg.preds);
  const auto rows = batch_separation(queries, preds, train, BatchOptions{cfg.mode, cfg.metric, resolve_workers(cfg.workers)});
  save_scores(rows, cfg.metric, cfg.out / "scores.csv");
  std::size_t failed = 0, safe = 0, correct = 0;
  for (const auto& r : rows) {
    if (!r.score) ++failed;
    else if (r.score->is_safe) ++safe;
    correct += r.correct ? 1 : 0;
  }
  json j;
  j["n"] = rows.size();
  j["failed"] = failed;
  j["safe"] = safe;
  j["correct"] = correct;
  return j;
}

nlohmann::ordered_json cmd_fit(const RunConfig& cfg) {
  require(cfg.scores, "--scores");
  require(cfg.out, "--out");
  const auto rows = scored_only(load_scores(cfg.scores));
  const auto preds = load_preds_if(cfg);
  const auto values = signal_values(rows, preds, cfg.signal);
  const auto pairs = bin_scores(values, correctness(rows), cfg.fit_bins);
  bool degenerate = false;
  const auto curve = fit_curve(pairs, cfg.curve, &degenerate);
  save_curve(curve, cfg.out / "curve.json");
  std::string table = "score,accuracy,weight\n";
  for (const auto& p : pairs) table += format_real(p.score) + ',' + format_real(p.accuracy) + ',' + format_real(p.weight) + '\n';
  write_text_file(cfg.out / "fit_pairs.csv", table);
  json j;
  j["curve"] = to_string(curve.kind);
  j["signal"] = to_string(cfg.signal);
  j["pairs"] = pairs.size();
  j["degenerate"] = degenerate;
  return j;
}

nlohmann::ordered_json cmd_calibrate(const RunConfig& cfg) {
  require(cfg.scores, "--scores");
  require(cfg.curve_file, "--curve-file");
  require(cfg.out, "--out");
  const auto rows = scored_only(load_scores(cfg.scores));
  const auto preds = load_preds_if(cfg);
  const auto values = signal_values(rows, preds, cfg.signal);
  const auto curve = load_curve(cfg.curve_file);
  std::string out = "index,confidence,correct\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out += std::to_string(rows[i].index) + ',' + format_real(apply_curve(curve, values[i])) + ',' +
           (rows[i].correct ? "1" : "0") + '\n';
  }
  write_text_file(cfg.out / "calibrated.csv", out);
  json j;
  j["n"] = rows.size();
  return j;
}

nlohmann::ordered_json cmd_ece(const RunConfig& cfg) {
  require(cfg.calibrated, "--calibrated");
  require(cfg.out, "--out");
  const auto rows = parse_calibrated(read_text_file(cfg.calibrated));
  std::vector<double> conf;
  std::vector<bool> correct;
  for (const auto& r : rows) {
    conf.push_back(r.confidence);
    correct.push_back(r.correct);
  }
  const auto rep = ece(conf, correct, cfg.ece_bins);
  write_text_file(cfg.out / "reliability.csv", reliability_table(rep));
  json j;
  j["command"] = "ece";
  j["config"] = config_json(cfg);
  j["report"] = to_json(rep);
  write_json(cfg.out / "ece.json", j);
  return j;
}

nlohmann::ordered_json cmd_compare(const RunConfig& cfg) {
  require(cfg.scores, "--scores");
  require(cfg.preds, "--preds");
  require(cfg.curve_file, "--curve-file");
  require(cfg.baseline_curve, "--baseline-curve");
  require(cfg.out, "--out");
  const auto rows = load_scores(cfg.scores);
  const auto preds = load_predictions(cfg.preds);
  const std::vector<NamedCurve> curves = {
      {"separation", Signal::Separation, load_curve(cfg.curve_file)},
      {"model_confidence", Signal::ModelConfidence, load_curve(cfg.baseline_curve)},
  };
  const auto cmp = compare_signals(rows, preds, curves, cfg.ece_bins);
  json signals = json::array();
  for (std::size_t i = 0; i < cmp.signals.size(); ++i) {
    const auto& s = cmp.signals[i];
    write_text_file(cfg.out / ("reliability_" + s.name + ".csv"), reliability_table(s.report));
    json e;
    e["name"] = s.name;
    e["signal"] = to_string(s.signal);
    e["report"] = to_json(s.report);
    e["improvement_percent"] = cmp.improvement_percent[i];
    signals.push_back(std::move(e));
  }
  json j;
  j["command"] = "compare";
  j["config"] = config_json(cfg);
  j["signals"] = std::move(signals);
  write_json(cfg.out / "compare.json", j);
  return j;
}

nlohmann::ordered_json cmd_synth(const RunConfig& cfg) {
  require(cfg.out, "--out");
  Dataset ds;
  if (cfg.synth_kind == "blobs") {
    ds = make_blobs(BlobSpec{cfg.n, cfg.dim, cfg.classes, cfg.spread, cfg.seed});
  } else if (cfg.synth_kind == "images") {
    ImageSpec spec;
    spec.n = cfg.n;
    spec.classes = cfg.classes;
    spec.seed = cfg.seed;
    ds = make_images(spec);
  } else {
    throw Error(ErrorCode::ConfigError, "unknown synth kind '" + cfg.synth_kind + "' (expected blobs or images)");
  }
  save_dataset(ds, cfg.out);
  json j;
  j["kind"] = cfg.synth_kind;
  j["n"] = ds.rows();
  j["d"] = ds.cols();
  j["classes"] = ds.num_classes();
  return j;
}

}  // namespace geosep::cli
