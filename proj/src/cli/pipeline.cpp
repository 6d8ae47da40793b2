#include <algorithm>
#include <unordered_map>

#include "geosep/cli.hpp"
#include "geosep/error.hpp"
#include "geosep/parallel.hpp"

namespace geosep::cli {
namespace {

using json = nlohmann::ordered_json;

// External predictions are indexed by row of the full dataset; re-index them
// onto the rows of one split block.
std::vector<PredictionRecord> select_preds(const std::unordered_map<std::size_t, PredictionRecord>& by_row,
                                           std::span<const std::size_t> rows) {
  std::vector<PredictionRecord> out;
  out.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto it = by_row.find(rows[i]);
    if (it == by_row.end()) {
      throw Error(ErrorCode::IndexError, "no prediction for dataset row " + std::to_string(rows[i]));
    }
    auto rec = it->second;
    rec.index = i;
    out.push_back(rec);
  }
  return out;
}

bool all_have_confidence(std::span<const PredictionRecord> preds) {
  return std::all_of(preds.begin(), preds.end(), [](const PredictionRecord& p) { return p.model_confidence.has_value(); });
}

json signal_json(const SignalEce& s, CurveKind curve, double improvement) {
  json j;
  j["name"] = s.name;
  j["signal"] = to_string(s.signal);
  j["curve"] = to_string(curve);
  j["ece"] = s.report.ece;
  j["improvement_percent"] = improvement;
  j["reliability"] = to_json(s.report)["bins"];
  return j;
}

}  // namespace

nlohmann::ordered_json cmd_pipeline(const RunConfig& cfg) {
  validate(cfg);
  if (cfg.data.empty()) throw Error(ErrorCode::ConfigError, "--data is required");
  if (cfg.out.empty()) throw Error(ErrorCode::ConfigError, "--out is required");
  const std::size_t workers = resolve_workers(cfg.workers);

  auto data = stage("load", [&] {
    auto ds = load_dataset(cfg.data, LoadOptions{cfg.normalize});
    if (cfg.grayscale) ds = grayscale(ds);
    return ds;
  });
  std::unordered_map<std::size_t, PredictionRecord> external;
  if (!cfg.preds.empty()) {
    stage("load predictions", [&] {
      for (const auto& p : load_predictions(cfg.preds)) external.emplace(p.index, p);
      return 0;
    });
  }

  json runs = json::array();
  std::vector<double> sep_eces;
  std::vector<double> base_eces;
  bool baseline_available = true;

  for (std::size_t s = 0; s < cfg.seeds; ++s) {
    const std::uint64_t seed = cfg.seed + s;
    const auto dir = cfg.out / ("seed_" + std::to_string(seed));

    const auto idx = stage("split", [&] { return split_indices(data.rows(), SplitSpec{seed}); });
    const auto train = data.subset(idx.train);
    const auto val = data.subset(idx.val);
    const auto test = data.subset(idx.test);
    stage("split", [&] {
      save_dataset(train, dir / "train.bin", DataFormat::Binary);
      save_dataset(val, dir / "val.bin", DataFormat::Binary);
      save_dataset(test, dir / "test.bin", DataFormat::Binary);
      return 0;
    });

    // Separation runs in the reduced space; the model sees original features.
    Dataset sep_train = train;
    Dataset sep_val = val;
    Dataset sep_test = test;
    json reduction = nullptr;
    if (cfg.reduce) {
      stage("reduce", [&] {
        const auto space = build_space(train, ReductionConfig{*cfg.reduce, cfg.t.front(), seed});
        save_space(space, dir / "space.json");
        sep_train = space.reduce_train(train);
        sep_val = space.map(val);
        sep_test = space.map(test);
        reduction = {{"method", to_string(*cfg.reduce)},
                     {"t", cfg.t.front()},
                     {"dim", sep_train.cols()},
                     {"train_rows", sep_train.rows()},
                     {"stored_scalars", stored_scalars(sep_train)}};
        return 0;
      });
    }

    std::vector<PredictionRecord> val_preds;
    std::vector<PredictionRecord> test_preds;
    stage("predict", [&] {
      if (!external.empty()) {
        val_preds = select_preds(external, idx.val);
        test_preds = select_preds(external, idx.test);
      } else {
        const ModelOptions mo{cfg.model, cfg.temperature, cfg.k, workers};
        val_preds = predict_all(train, val, mo);
        test_preds = predict_all(train, test, mo);
      }
      save_predictions(val_preds, dir / "val_preds.csv");
      save_predictions(test_preds, dir / "test_preds.csv");
      return 0;
    });

    const BatchOptions bo{cfg.mode, cfg.metric, workers};
    const auto val_scores = stage("score", [&] {
      auto rows = batch_separation(sep_val, val_preds, sep_train, bo);
      save_scores(rows, cfg.metric, dir / "val_scores.csv");
      return rows;
    });
    const auto test_scores = stage("score", [&] {
      auto rows = batch_separation(sep_test, test_preds, sep_train, bo);
      save_scores(rows, cfg.metric, dir / "test_scores.csv");
      return rows;
    });

    const bool with_baseline = all_have_confidence(val_preds) && all_have_confidence(test_preds);
    baseline_available = baseline_available && with_baseline;
    bool degenerate = false;
    std::vector<NamedCurve> curves;
    stage("fit", [&] {
      std::vector<ScoreRow> ok;
      for (const auto& r : val_scores) {
        if (r.score) ok.push_back(r);
      }
      if (ok.empty()) throw Error(ErrorCode::EmptyInput, "no validation row could be scored");
      std::vector<bool> correct;
      for (const auto& r : ok) correct.push_back(r.correct);
      const auto sep_pairs = bin_scores(signal_values(ok, val_preds, Signal::Separation), correct, cfg.fit_bins);
      curves.push_back({"separation", Signal::Separation, fit_curve(sep_pairs, cfg.curve, &degenerate)});
      save_curve(curves.back().curve, dir / "curve.json");
      if (with_baseline) {
        const auto conf_pairs =
            bin_scores(signal_values(ok, val_preds, Signal::ModelConfidence), correct, cfg.fit_bins);
        curves.push_back({"model_confidence", Signal::ModelConfidence, fit_isotonic(conf_pairs)});
        save_curve(curves.back().curve, dir / "baseline_curve.json");
      }
      return 0;
    });

    const auto cmp = stage("evaluate", [&] {
      auto c = compare_signals(test_scores, test_preds, curves, cfg.ece_bins);
      for (const auto& sig : c.signals) {
        write_text_file(dir / ("reliability_" + sig.name + ".csv"), reliability_table(sig.report));
      }
      return c;
    });

    std::size_t failed = 0;
    std::size_t hits = 0;
    for (const auto& r : test_scores) {
      failed += r.score ? 0 : 1;
      hits += r.correct ? 1 : 0;
    }
    json run;
    run["seed"] = seed;
    run["sizes"] = {{"train", train.rows()}, {"val", val.rows()}, {"test", test.rows()}};
    run["reduction"] = reduction;
    run["model_accuracy"] = static_cast<double>(hits) / static_cast<double>(test.rows());
    run["failed_rows"] = failed;
    run["degenerate_fit"] = degenerate;
    json signals = json::array();
    signals.push_back(signal_json(cmp.signals[0], cfg.curve, cmp.improvement_percent[0]));
    sep_eces.push_back(cmp.signals[0].report.ece);
    if (cmp.signals.size() > 1) {
      signals.push_back(signal_json(cmp.signals[1], CurveKind::Isotonic, cmp.improvement_percent[1]));
      base_eces.push_back(cmp.signals[1].report.ece);
    }
    run["signals"] = std::move(signals);
    runs.push_back(std::move(run));
  }

  auto interval_json = [](const std::vector<double>& v) {
    const auto iv = mean_interval(v);
    return json{{"mean", iv.mean}, {"half_width", iv.half_width}, {"k", iv.k}};
  };
  json summary;
  summary["separation"] = interval_json(sep_eces);
  if (baseline_available) {
    summary["model_confidence"] = interval_json(base_eces);
    summary["improvement_percent"] = relative_improvement(mean_interval(sep_eces).mean, mean_interval(base_eces).mean);
  } else {
    summary["model_confidence"] = nullptr;
    summary["improvement_percent"] = nullptr;
  }

  json report;
  report["command"] = "pipeline";
  report["config"] = config_json(cfg);
  report["runs"] = std::move(runs);
  report["summary"] = std::move(summary);
  write_json(cfg.out / "report.json", report);
  return report;
}

}  // namespace geosep::cli
