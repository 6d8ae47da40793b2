#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "geosep/cli.hpp"
#include "geosep/error.hpp"

using namespace geosep;
using namespace geosep::cli;

namespace {

struct RawFlags {
  std::string metric = "l2";
  std::string mode = "fast";
  std::string curve = "isotonic";
  std::string signal = "separation";
  std::string reduce;
  std::string model = "centroid";
};

void add_common(CLI::App* sub, RunConfig& cfg, RawFlags& raw) {
  sub->add_option("--data", cfg.data, "Full dataset (CSV or binary)");
  sub->add_option("--train", cfg.train, "Training dataset");
  sub->add_option("--queries", cfg.queries, "Query dataset");
  sub->add_option("--preds", cfg.preds, "Prediction file");
  sub->add_option("--scores", cfg.scores, "Score file");
  sub->add_option("--curve-file", cfg.curve_file, "Calibration curve JSON");
  sub->add_option("--baseline-curve", cfg.baseline_curve, "Curve for the model_confidence signal");
  sub->add_option("--calibrated", cfg.calibrated, "Calibrated confidence CSV");
  sub->add_option("--out", cfg.out, "Output directory (output file for synth)");
  sub->add_option("--metric", raw.metric, "l1, l2 or linf");
  sub->add_option("--mode", raw.mode, "fast or exact");
  sub->add_option("--fit-bins", cfg.fit_bins, "Equal-frequency fit bins; 0 = one per unique score");
  sub->add_option("--ece-bins", cfg.ece_bins, "ECE bins");
  sub->add_option("--curve", raw.curve, "isotonic or sigmoid");
  sub->add_option("--signal", raw.signal, "separation or model_confidence");
  sub->add_option("--reduce", raw.reduce, "pool, maxpool, pca, rbi, randpix, kmeans or randset");
  sub->add_option("--t", cfg.t, "Reduction factor (bench accepts a list)")->delimiter(',');
  sub->add_option("--seed", cfg.seed, "Seed for every randomized step");
  sub->add_option("--seeds", cfg.seeds, "Pipeline: number of consecutive seeds");
  sub->add_flag("--grayscale", cfg.grayscale, "Convert RGB images to luma first");
  sub->add_flag("--normalize", cfg.normalize, "Min-max normalize features at load");
  sub->add_option("--model", raw.model, "centroid or knn");
  sub->add_option("--k", cfg.k, "Neighbours for knn (odd)");
  sub->add_option("--temperature", cfg.temperature, "Centroid softmax temperature");
  sub->add_option("--workers", cfg.workers, "Worker threads (default: GEOSEP_WORKERS, then all cores)");
  sub->add_option("--reps", cfg.reps, "Bench repetitions");
  sub->add_option("--warmup", cfg.warmup, "Bench warmup queries");
  sub->add_option("--kind", cfg.synth_kind, "synth: blobs or images");
  sub->add_option("--n", cfg.n, "synth: rows");
  sub->add_option("--dim", cfg.dim, "synth: blob dimension");
  sub->add_option("--classes", cfg.classes, "synth: classes");
  sub->add_option("--spread", cfg.spread, "synth: blob centre distance from the origin");
}

void resolve(RunConfig& cfg, const RawFlags& raw) {
  cfg.metric = parse_metric(raw.metric);
  cfg.mode = parse_mode(raw.mode);
  cfg.curve = parse_curve_kind(raw.curve);
  cfg.signal = parse_signal(raw.signal);
  cfg.model = parse_model_kind(raw.model);
  if (!raw.reduce.empty() && raw.reduce != "none") cfg.reduce = parse_reduction_method(raw.reduce);
  validate(cfg);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"geosep: geometric separation scores and calibrated confidence"};
  app.require_subcommand(1);
  RunConfig cfg;
  RawFlags raw;
  const std::vector<std::pair<const char*, const char*>> commands = {
      {"split", "Split a dataset 60/20/20 with a seeded shuffle"},
      {"reduce", "Fit a reduction on train and map train/queries"},
      {"predict", "Predict queries with a built-in model"},
      {"score", "Separation score for every prediction"},
      {"fit", "Fit a calibration curve on validation scores"},
      {"calibrate", "Apply a curve to a score file"},
      {"ece", "Expected calibration error of calibrated confidences"},
      {"compare", "ECE of separation against the model-confidence baseline"},
      {"bench", "Fast-separation throughput per reduction factor"},
      {"pipeline", "split, reduce, predict, score, fit, evaluate"},
      {"synth", "Write a synthetic dataset"},
  };
  for (const auto& [name, help] : commands) add_common(app.add_subcommand(name, help), cfg, raw);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    cfg.command = app.get_subcommands().front()->get_name();
    resolve(cfg, raw);
    nlohmann::ordered_json result;
    const auto& c = cfg.command;
    if (c == "split") result = cmd_split(cfg);
    else if (c == "reduce") result = cmd_reduce(cfg);
    else if (c == "predict") result = cmd_predict(cfg);
    else if (c == "score") result = cmd_score(cfg);
    else if (c == "fit") result = cmd_fit(cfg);
    else if (c == "calibrate") result = cmd_calibrate(cfg);
    else if (c == "ece") result = cmd_ece(cfg);
    else if (c == "compare") result = cmd_compare(cfg);
    else if (c == "bench") result = cmd_bench(cfg);
    else if (c == "pipeline") result = cmd_pipeline(cfg);
    else if (c == "synth") result = cmd_synth(cfg);
    std::cout << result.dump(2) << '\n';
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  }
}
