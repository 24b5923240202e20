// occ: one-class classification benchmark toolkit CLI.
//
// Subcommands: synth, normalize, sample, tune, train, predict, evaluate,
// benchmark, plot. Exit codes: 0 success, 1 runtime failure, 2 usage error.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "occ/config.hpp"
#include "occ/csv.hpp"
#include "occ/harness.hpp"
#include "occ/model_io.hpp"
#include "occ/sampling.hpp"
#include "occ/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json j;
  in >> j;
  return j;
}

occ::Dataset load_labeled_csv(const std::string& path, const std::string& mode) {
  return occ::load_csv(path, mode == "truth" ? occ::LabelMode::truth
                                             : occ::LabelMode::observed);
}

struct TrainArgs {
  std::string method;
  std::string positives, background, negatives;
  std::string params_json;
  std::uint64_t seed = 0;
  double threshold = 0.5;
  std::string out = "model.json";
};

occ::TrainingDraw draw_from_files(const TrainArgs& a) {
  occ::TrainingDraw draw;
  if (!a.positives.empty()) draw.positives = load_labeled_csv(a.positives, "observed");
  if (!a.background.empty()) draw.background = load_labeled_csv(a.background, "observed");
  if (!a.negatives.empty()) draw.negatives = load_labeled_csv(a.negatives, "observed");
  // Files may carry mixed rows; keep the stratum each file is meant to hold.
  draw.positives = occ::partition_by_label(draw.positives).positives;
  draw.background = occ::partition_by_label(draw.background).background;
  draw.negatives = occ::partition_by_label(draw.negatives).negatives;
  return draw;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"one-class classification toolkit (PBL, PUL, MAXENT, OCSVM, BSVM + baselines)"};
  app.require_subcommand(1);

  // synth -----------------------------------------------------------------
  auto* synth = app.add_subcommand("synth", "generate a synthetic scene CSV with ground truth");
  std::string synth_config, synth_out = "scene.csv";
  std::uint64_t synth_seed = occ::scene_a_seed;
  std::size_t synth_n = 0;
  synth->add_option("--config", synth_config, "scene spec JSON file (default: scene-a)");
  synth->add_option("--seed", synth_seed, "generator seed");
  synth->add_option("--n", synth_n, "override object count");
  synth->add_option("--out", synth_out, "output CSV path");

  // normalize ---------------------------------------------------------------
  auto* normalize = app.add_subcommand("normalize", "min-max normalize a dataset CSV");
  std::string norm_input, norm_table, norm_out = "normalized.csv",
              norm_table_out = "normalization.csv", norm_mode = "truth";
  normalize->add_option("--input", norm_input, "dataset CSV")->required();
  normalize->add_option("--table", norm_table, "apply an existing feature,min,max table");
  normalize->add_option("--mode", norm_mode, "label mode: truth|observed")
      ->check(CLI::IsMember({"truth", "observed"}));
  normalize->add_option("--out", norm_out, "normalized CSV path");
  normalize->add_option("--table-out", norm_table_out, "fitted table CSV path");

  // sample ------------------------------------------------------------------
  auto* sample = app.add_subcommand("sample", "draw one trial's training sets");
  std::string sample_input, sample_out = "draw";
  occ::SamplingPlan plan;
  std::size_t sample_trial = 0;
  std::uint64_t sample_seed = 0;
  sample->add_option("--input", sample_input, "ground-truth dataset CSV")->required();
  sample->add_option("--n-positive", plan.n_positive, "positive draw size");
  sample->add_option("--n-background", plan.n_background, "background draw size");
  sample->add_option("--n-negative", plan.n_negative, "negative draw size (0 to skip)");
  sample->add_option("--n-trials", plan.n_trials, "trial count");
  sample->add_option("--trial", sample_trial, "trial index");
  sample->add_option("--seed", sample_seed, "sampling seed");
  sample->add_flag("--exclude-observed-positives", plan.exclude_observed_positives,
                   "keep drawn positives out of the background pool");
  sample->add_option("--out", sample_out, "output directory");

  // train ---------------------------------------------------------------
  auto* train = app.add_subcommand("train", "train one method from drawn CSVs");
  TrainArgs ta;
  train->add_option("--method", ta.method, "pbl|pul|maxent|ocsvm|bsvm|ann|svm")->required();
  train->add_option("--positives", ta.positives, "positive CSV")->required();
  train->add_option("--background", ta.background, "background CSV");
  train->add_option("--negatives", ta.negatives, "negative CSV (ann/svm)");
  train->add_option("--params", ta.params_json, "method params JSON file");
  train->add_option("--seed", ta.seed, "training seed");
  train->add_option("--threshold", ta.threshold, "presence threshold");
  train->add_option("--out", ta.out, "model JSON path");

  // tune ----------------------------------------------------------------
  auto* tune = app.add_subcommand("tune", "hyperparameter search maximizing F_pb");
  TrainArgs tu;
  std::string tuner_json;
  tu.out = "tune.json";
  tune->add_option("--method", tu.method, "method name")->required();
  tune->add_option("--positives", tu.positives, "positive CSV")->required();
  tune->add_option("--background", tu.background, "background CSV")->required();
  tune->add_option("--negatives", tu.negatives, "negative CSV (ann/svm)");
  tune->add_option("--params", tu.params_json, "fixed method params JSON file");
  tune->add_option("--tuner", tuner_json, "tuner spec JSON file")->required();
  tune->add_option("--seed", tu.seed, "search seed");
  tune->add_option("--threshold", tu.threshold, "presence threshold");
  tune->add_option("--out", tu.out, "result JSON path");

  // predict -------------------------------------------------------------
  auto* predict = app.add_subcommand("predict", "score a dataset with a trained model");
  std::string pred_model, pred_input, pred_out = "predictions.csv", pred_mode = "truth";
  double pred_threshold = 0.5;
  predict->add_option("--model", pred_model, "model JSON")->required();
  predict->add_option("--input", pred_input, "dataset CSV")->required();
  predict->add_option("--mode", pred_mode, "label mode of input: truth|observed")
      ->check(CLI::IsMember({"truth", "observed"}));
  predict->add_option("--threshold", pred_threshold, "threshold for soft models");
  predict->add_option("--out", pred_out, "predictions CSV (id,score,label)");

  // evaluate --------------------------------------------------------------
  auto* evaluate = app.add_subcommand("evaluate", "assess predictions against ground truth");
  std::string eval_pred, eval_ref, eval_out = "assessment.json";
  evaluate->add_option("--predictions", eval_pred, "predictions CSV from `predict`")->required();
  evaluate->add_option("--reference", eval_ref, "ground-truth dataset CSV")->required();
  evaluate->add_option("--out", eval_out, "assessment JSON path");

  // benchmark -------------------------------------------------------------
  auto* benchmark = app.add_subcommand("benchmark", "run the multi-trial experiment");
  std::string bench_config, bench_out;
  std::optional<std::uint64_t> bench_seed;
  bool bench_scene_a = false;
  benchmark->add_option("--config", bench_config, "experiment config JSON");
  benchmark->add_flag("--scene-a", bench_scene_a, "use the frozen scene-a benchmark config");
  benchmark->add_option("--seed", bench_seed, "override config seed");
  benchmark->add_option("--out", bench_out, "override output directory");

  // plot ------------------------------------------------------------------
  auto* plot = app.add_subcommand("plot", "render a box plot from a saved report");
  std::string plot_report, plot_metric = "f_score", plot_out;
  plot->add_option("--report", plot_report, "report.json path")->required();
  plot->add_option("--metric", plot_metric, "metric name");
  plot->add_option("--out", plot_out, "output SVG path (default <metric>.svg)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (synth->parsed()) {
      occ::SceneSpec spec = synth_config.empty()
                                ? occ::scene_a_spec()
                                : occ::scene_spec_from_json(read_json_file(synth_config));
      if (synth_n > 0) spec.n_objects = synth_n;
      const occ::Scene scene = occ::generate_scene(spec, synth_seed);
      occ::save_csv(scene.dataset, synth_out, occ::LabelMode::truth);
      std::cout << "wrote " << synth_out << " (" << scene.dataset.size() << " objects, "
                << scene.dataset.feature_count() << " features)\n";
    } else if (normalize->parsed()) {
      const occ::Dataset d = load_labeled_csv(norm_input, norm_mode);
      const occ::LabelMode mode =
          norm_mode == "truth" ? occ::LabelMode::truth : occ::LabelMode::observed;
      if (!norm_table.empty()) {
        const occ::MinMaxTable t = occ::load_minmax_csv(norm_table);
        occ::save_csv(occ::apply_normalization(d, t), norm_out, mode);
      } else {
        auto [normalized, table] = occ::min_max_normalize(d);
        occ::save_csv(normalized, norm_out, mode);
        occ::save_minmax_csv(table, norm_table_out);
        std::cout << "wrote " << norm_table_out << "\n";
      }
      std::cout << "wrote " << norm_out << "\n";
    } else if (sample->parsed()) {
      const occ::Dataset d = load_labeled_csv(sample_input, "truth");
      plan.seed = sample_seed;
      const occ::TrainingDraw draw = occ::draw_training_sets(d, plan, sample_trial);
      fs::create_directories(sample_out);
      occ::save_csv(draw.positives, sample_out + "/positives.csv", occ::LabelMode::observed);
      occ::save_csv(draw.background, sample_out + "/background.csv", occ::LabelMode::observed);
      if (!draw.negatives.empty())
        occ::save_csv(draw.negatives, sample_out + "/negatives.csv", occ::LabelMode::observed);
      std::cout << "wrote draw (" << draw.positives.size() << " positives, "
                << draw.background.size() << " background, " << draw.negatives.size()
                << " negatives) to " << sample_out << "\n";
    } else if (train->parsed()) {
      occ::MethodSpec spec;
      spec.name = ta.method;
      if (!ta.params_json.empty()) spec.params = read_json_file(ta.params_json);
      const occ::TrainingDraw draw = draw_from_files(ta);
      const occ::TrainedPredictor model = occ::train_method(spec, draw, ta.seed, ta.threshold);
      occ::write_file_atomic(ta.out, model.model_json.dump(2) + "\n");
      std::cout << "wrote " << ta.out << "\n";
    } else if (tune->parsed()) {
      occ::MethodSpec spec;
      spec.name = tu.method;
      if (!tu.params_json.empty()) spec.params = read_json_file(tu.params_json);
      spec.tuner = read_json_file(tuner_json);
      const occ::TrainingDraw draw = draw_from_files(tu);
      const occ::TuneResult result = occ::tune_method(spec, draw, tu.seed, tu.threshold);
      occ::write_file_atomic(tu.out, occ::tune_result_to_json(result).dump(2) + "\n");
      std::cout << "best objective " << result.best_objective << " after "
                << result.evaluations << " evaluations; wrote " << tu.out << "\n";
    } else if (predict->parsed()) {
      const occ::LoadedModel model = occ::load_model_file(pred_model);
      const occ::Dataset d = load_labeled_csv(pred_input, pred_mode);
      std::string csv = "id,score,label\n";
      for (const occ::Sample& s : d.samples) {
        csv += s.id + "," + occ::detail::format_double(model.score(s.features)) + "," +
               (model.label(s.features, pred_threshold) ? "1" : "0") + "\n";
      }
      occ::write_file_atomic(pred_out, csv);
      std::cout << "wrote " << pred_out << " (" << d.size() << " rows)\n";
    } else if (evaluate->parsed()) {
      const occ::Dataset ref = load_labeled_csv(eval_ref, "truth");
      std::ifstream in(eval_pred);
      if (!in) throw std::runtime_error("cannot open " + eval_pred);
      std::unordered_map<std::string, int> predicted;
      std::string line;
      std::getline(in, line);  // header
      std::size_t lineno = 1;
      while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto fields = occ::detail::split_csv_line(line);
        if (fields.size() != 3)
          throw occ::ParseError(eval_pred, lineno, "expected id,score,label");
        predicted[std::string(fields[0])] = fields[2] == "1" ? 1 : 0;
      }
      std::vector<int> truth_v, pred_v;
      for (const occ::Sample& s : ref.samples) {
        if (!s.label.truth) continue;
        const auto it = predicted.find(s.id);
        if (it == predicted.end()) continue;
        truth_v.push_back(*s.label.truth == occ::Truth::presence ? 1 : 0);
        pred_v.push_back(it->second);
      }
      if (truth_v.empty()) throw std::runtime_error("no overlapping ids with ground truth");
      const occ::AssessmentBundle b =
          occ::assess(occ::confusion_from_predictions(truth_v, pred_v));
      occ::write_file_atomic(eval_out, occ::assessment_to_json(b).dump(2) + "\n");
      std::cout << "f_score " << b.f_score << ", oa " << b.oa << ", kappa " << b.kappa
                << "; wrote " << eval_out << "\n";
    } else if (benchmark->parsed()) {
      occ::ExperimentConfig cfg;
      if (bench_scene_a) {
        cfg = occ::scene_a_benchmark_config();
      } else if (!bench_config.empty()) {
        cfg = occ::experiment_config_from_json(read_json_file(bench_config));
      } else {
        throw std::runtime_error("benchmark: provide --config or --scene-a");
      }
      if (bench_seed) {
        cfg.seed = *bench_seed;
        cfg.sampling.seed = *bench_seed;
      }
      if (!bench_out.empty()) cfg.out_dir = bench_out;
      const occ::BenchmarkReport report = occ::run_benchmark(cfg);
      const auto written = occ::emit_report(report, cfg.out_dir);
      for (const auto& p : written) std::cout << "wrote " << p.string() << "\n";
      for (const auto& [method, metrics] : report.aggregates)
        std::cout << method << ": mean f_score " << metrics.at("f_score").mean << "\n";
    } else if (plot->parsed()) {
      const json report = read_json_file(plot_report);
      const std::string svg = occ::render_boxplot_from_report(report, plot_metric);
      const std::string out = plot_out.empty() ? plot_metric + ".svg" : plot_out;
      occ::write_file_atomic(out, svg);
      std::cout << "wrote " << out << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
