#pragma once

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "occ/boxplot.hpp"
#include "occ/config.hpp"
#include "occ/csv.hpp"
#include "occ/maxent.hpp"
#include "occ/metrics.hpp"
#include "occ/model_io.hpp"
#include "occ/pu.hpp"
#include "occ/svm.hpp"
#include "occ/synth.hpp"
#include "occ/tuning.hpp"

namespace occ {

/// A trained classifier behind a uniform predict surface, plus its
/// serialized form for the train/predict CLI round trip.
struct TrainedPredictor {
  std::string method;
  std::function<double(std::span<const double>)> score;  // probability or SVM decision
  std::function<bool(std::span<const double>)> label;
  nlohmann::json model_json;
};

namespace detail {

inline MlpConfig mlp_config_from_params(const nlohmann::json& p, std::uint64_t seed) {
  MlpConfig c;
  c.hidden_units = p.value("hidden_units", c.hidden_units);
  c.hidden_layers = p.value("hidden_layers", c.hidden_layers);
  c.ensemble_size = p.value("ensemble_size", c.ensemble_size);
  c.epochs = p.value("epochs", c.epochs);
  c.learning_rate = p.value("learning_rate", c.learning_rate);
  c.l2_penalty = p.value("l2_penalty", c.l2_penalty);
  c.seed = seed;
  return c;
}

inline MaxentConfig maxent_config_from_params(const nlohmann::json& p, std::uint64_t seed) {
  MaxentConfig c;
  c.quadratic = p.value("quadratic", c.quadratic);
  c.product = p.value("product", c.product);
  c.l1_penalty = p.value("l1_penalty", c.l1_penalty);
  c.max_iterations = p.value("max_iterations", c.max_iterations);
  c.tolerance = p.value("tolerance", c.tolerance);
  c.seed = seed;
  return c;
}

inline Dataset concat(const Dataset& a, const Dataset& b) {
  Dataset out;
  out.feature_names = a.empty() ? b.feature_names : a.feature_names;
  out.samples.reserve(a.size() + b.size());
  for (const Sample& s : a.samples) out.samples.push_back(s);
  for (const Sample& s : b.samples) out.samples.push_back(s);
  return out;
}

}  // namespace detail

/// Trains one method on a trial's draw. Method names: pbl, pul, maxent,
/// ocsvm, bsvm (one-class family), ann, svm (supervised baselines).
inline TrainedPredictor train_method(const MethodSpec& spec, const TrainingDraw& draw,
                                     std::uint64_t seed, double threshold) {
  const nlohmann::json& p = spec.params;
  TrainedPredictor out;
  out.method = spec.name;

  if (spec.name == "pbl" || spec.name == "pul") {
    const PuVariant variant = spec.name == "pul" ? PuVariant::pul : PuVariant::pbl;
    const SoftBaseKind base = p.value("base", std::string("mlp")) == "logistic"
                                  ? SoftBaseKind::logistic
                                  : SoftBaseKind::mlp;
    auto model = std::make_shared<PuModel>(
        train_pu(draw.positives, draw.background, variant,
                 detail::mlp_config_from_params(p, seed),
                 p.value("holdout_fraction", 0.25), base, threshold));
    out.score = [model](std::span<const double> x) { return model->corrected_score(x); };
    out.label = [model](std::span<const double> x) { return model->classify(x).second; };
    out.model_json = pu_model_to_json(*model);
  } else if (spec.name == "maxent") {
    auto model = std::make_shared<TrainedSoftModel>(train_maxent(
        draw.positives, draw.background, detail::maxent_config_from_params(p, seed)));
    out.score = [model](std::span<const double> x) { return model->predict_score(x); };
    out.label = [model, threshold](std::span<const double> x) {
      return model->predict_score(x) >= threshold;
    };
    out.model_json = model->to_json();
  } else if (spec.name == "ocsvm") {
    auto model = std::make_shared<SvmModel>(
        train_ocsvm(draw.positives, p.value("nu", 0.1), p.value("gamma", 1.0)));
    out.score = [model](std::span<const double> x) { return decision_value(*model, x); };
    out.label = [model](std::span<const double> x) { return predict_label(*model, x) > 0; };
    out.model_json = svm_to_json(*model);
  } else if (spec.name == "bsvm") {
    auto model = std::make_shared<SvmModel>(
        train_bsvm(draw.positives, draw.background, p.value("c_plus", 1.0),
                   p.value("c_minus", 1.0), p.value("gamma", 1.0)));
    out.score = [model](std::span<const double> x) { return decision_value(*model, x); };
    out.label = [model](std::span<const double> x) { return predict_label(*model, x) > 0; };
    out.model_json = svm_to_json(*model);
  } else if (spec.name == "svm") {
    if (draw.negatives.empty())
      throw std::invalid_argument("svm baseline needs a negative draw (n_negative > 0)");
    auto model = std::make_shared<SvmModel>(train_csvc(
        draw.positives, draw.negatives, p.value("c", 10.0), p.value("gamma", 1.0), seed));
    out.score = [model](std::span<const double> x) { return decision_value(*model, x); };
    out.label = [model](std::span<const double> x) { return predict_label(*model, x) > 0; };
    out.model_json = svm_to_json(*model);
  } else if (spec.name == "ann") {
    if (draw.negatives.empty())
      throw std::invalid_argument("ann baseline needs a negative draw (n_negative > 0)");
    const Dataset train = detail::concat(draw.positives, draw.negatives);
    std::vector<int> targets(train.size(), 0);
    std::fill(targets.begin(), targets.begin() + static_cast<std::ptrdiff_t>(draw.positives.size()), 1);
    auto model = std::make_shared<TrainedSoftModel>(
        train_mlp(train, targets, detail::mlp_config_from_params(p, seed)));
    out.score = [model](std::span<const double> x) { return model->predict_score(x); };
    out.label = [model, threshold](std::span<const double> x) {
      return model->predict_score(x) >= threshold;
    };
    out.model_json = model->to_json();
  } else {
    throw std::invalid_argument("unknown method: " + spec.name);
  }
  return out;
}

/// Hyperparameter search for a method: axes name parameters in the
/// method's params object; each evaluation trains on 75% of the trial's
/// positive+background draw and scores F_pb on the held-out 25%.
inline TuneResult tune_method(const MethodSpec& spec, const TrainingDraw& draw,
                              std::uint64_t seed, double threshold) {
  if (!spec.tuner) throw std::invalid_argument("tune_method: no tuner spec");
  const nlohmann::json& t = *spec.tuner;
  const std::string kind = t.value("kind", std::string("grid"));

  const Dataset combined = detail::concat(draw.positives, draw.background);
  auto [tune_train, tune_val] = holdout_split(combined, 0.25, Rng::mix(seed, 0x7e57));
  const LabelPartition split = partition_by_label(tune_train);

  std::vector<std::string> names;
  auto objective_for = [&](const std::vector<std::string>& param_names) {
    return [&, param_names](std::span<const double> params) {
      MethodSpec candidate = spec;
      candidate.tuner.reset();
      for (std::size_t i = 0; i < param_names.size(); ++i)
        candidate.params[param_names[i]] = params[i];
      TrainingDraw sub;
      sub.positives = split.positives;
      sub.background = split.background;
      sub.negatives = draw.negatives;
      return objective_fpb(
          [&](const Dataset&) {
            return train_method(candidate, sub, seed, threshold).label;
          },
          tune_train, tune_val);
    };
  };

  if (kind == "grid") {
    GridSpec grid;
    for (const auto& a : t.at("axes")) {
      GridAxis axis;
      axis.name = a.at("name").get<std::string>();
      axis.scale = a.value("scale", std::string("log2")) == "linear"
                       ? GridAxis::Scale::linear
                       : GridAxis::Scale::log2;
      axis.lo = a.at("lo").get<double>();
      axis.hi = a.at("hi").get<double>();
      axis.steps = a.value("steps", std::size_t{11});
      names.push_back(axis.name);
      grid.axes.push_back(std::move(axis));
    }
    return grid_search(objective_for(names), grid);
  }
  if (kind == "pso") {
    PsoConfig cfg;
    for (const auto& a : t.at("axes")) {
      cfg.param_names.push_back(a.at("name").get<std::string>());
      cfg.bounds.push_back({a.at("lo").get<double>(), a.at("hi").get<double>()});
      names.push_back(cfg.param_names.back());
    }
    cfg.swarm_size = t.value("swarm_size", cfg.swarm_size);
    cfg.iterations = t.value("iterations", cfg.iterations);
    cfg.inertia = t.value("inertia", cfg.inertia);
    cfg.cognitive = t.value("cognitive", cfg.cognitive);
    cfg.social = t.value("social", cfg.social);
    cfg.seed = Rng::mix(seed, 0x9507);
    return pso_optimize(objective_for(names), cfg);
  }
  throw std::invalid_argument("tune_method: unknown tuner kind " + kind);
}

struct TrialRecord {
  std::size_t trial = 0;
  std::string method;
  AssessmentBundle assessment;
  std::optional<nlohmann::json> tune;
  double train_seconds = 0;
  double predict_seconds = 0;
  std::string error;  // empty when the record is complete
  bool complete = false;
};

struct BenchmarkReport {
  nlohmann::json config_echo;
  std::vector<TrialRecord> trials;
  std::map<std::string, std::map<std::string, SummaryStats>> aggregates;
};

/// Runs the multi-trial protocol: per trial, draw training sets, train
/// every method (tuning first when configured), predict the evaluation
/// set, and assess against ground truth. A method failure is recorded in
/// its TrialRecord and the run continues. Deterministic given the config
/// except the wall-clock fields.
inline BenchmarkReport run_benchmark(const ExperimentConfig& cfg) {
  using clock = std::chrono::steady_clock;
  Dataset data = !cfg.csv_path.empty() ? load_csv(cfg.csv_path, LabelMode::truth)
                                       : generate_scene(*cfg.scene, cfg.scene_seed).dataset;
  const std::size_t n = data.size();
  std::vector<int> truth(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!data.samples[i].label.truth)
      throw std::runtime_error("benchmark: sample " + data.samples[i].id +
                               " has no ground truth");
    truth[i] = *data.samples[i].label.truth == Truth::presence ? 1 : 0;
  }
  std::unordered_map<std::string, std::size_t> index_of;
  index_of.reserve(n);
  for (std::size_t i = 0; i < n; ++i) index_of.emplace(data.samples[i].id, i);

  SamplingPlan plan = cfg.sampling;
  plan.seed = cfg.seed;
  const FeatureMatrix eval_x = features_of(data);

  auto run_trial = [&](std::size_t trial) {
    std::vector<TrialRecord> records;
    const TrainingDraw draw = draw_training_sets(data, plan, trial);
    std::vector<std::size_t> pos_rows, bg_rows;
    for (const Sample& s : draw.positives.samples) pos_rows.push_back(index_of.at(s.id));
    for (const Sample& s : draw.background.samples) bg_rows.push_back(index_of.at(s.id));
    std::unordered_set<std::size_t> excluded;
    if (cfg.exclude_training_from_eval) {
      excluded.insert(pos_rows.begin(), pos_rows.end());
      excluded.insert(bg_rows.begin(), bg_rows.end());
      for (const Sample& s : draw.negatives.samples) excluded.insert(index_of.at(s.id));
    }

    for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
      const MethodSpec& spec = cfg.methods[mi];
      TrialRecord rec;
      rec.trial = trial;
      rec.method = spec.name;
      const std::uint64_t seed_m = Rng::mix(Rng::mix(cfg.seed, trial), 0x600d + mi);
      try {
        MethodSpec effective = spec;
        if (spec.tuner) {
          const TuneResult tr = tune_method(spec, draw, seed_m, cfg.threshold);
          for (std::size_t i = 0; i < tr.param_names.size(); ++i)
            effective.params[tr.param_names[i]] = tr.best_params[i];
          effective.tuner.reset();
          rec.tune = tune_result_to_json(tr);
        }
        const auto t0 = clock::now();
        const TrainedPredictor model = train_method(effective, draw, seed_m, cfg.threshold);
        const auto t1 = clock::now();
        std::vector<char> predicted(n);
        for (std::size_t i = 0; i < n; ++i) predicted[i] = model.label(eval_x.row(i)) ? 1 : 0;
        const auto t2 = clock::now();
        rec.train_seconds = std::chrono::duration<double>(t1 - t0).count();
        rec.predict_seconds = std::chrono::duration<double>(t2 - t1).count();

        ConfusionCounts cc;
        for (std::size_t i = 0; i < n; ++i) {
          if (excluded.contains(i)) continue;
          if (truth[i]) {
            predicted[i] ? ++cc.tp : ++cc.fn;
          } else {
            predicted[i] ? ++cc.fp : ++cc.tn;
          }
        }
        PbConfusion pb;
        for (std::size_t i : pos_rows) predicted[i] ? ++pb.tp_prime : ++pb.fn_prime;
        for (std::size_t i : bg_rows) predicted[i] ? ++pb.fp_prime : ++pb.background_negative;
        rec.assessment = assess(cc, pb);
        rec.complete = true;
      } catch (const std::exception& e) {
        rec.error = e.what();
        rec.complete = false;
      }
      records.push_back(std::move(rec));
    }
    return records;
  };

  BenchmarkReport report;
  report.config_echo = experiment_config_to_json(cfg);
  std::vector<std::vector<TrialRecord>> per_trial(plan.n_trials);
  if (cfg.workers > 1) {
    // Trials are independent (substreams per trial); collect by index.
    std::vector<std::future<std::vector<TrialRecord>>> futures;
    futures.reserve(plan.n_trials);
    for (std::size_t t = 0; t < plan.n_trials; ++t)
      futures.push_back(std::async(std::launch::async, run_trial, t));
    for (std::size_t t = 0; t < plan.n_trials; ++t) per_trial[t] = futures[t].get();
  } else {
    for (std::size_t t = 0; t < plan.n_trials; ++t) per_trial[t] = run_trial(t);
  }
  for (auto& recs : per_trial)
    for (auto& r : recs) report.trials.push_back(std::move(r));

  std::map<std::string, std::vector<AssessmentBundle>> by_method;
  for (const TrialRecord& r : report.trials)
    if (r.complete) by_method[r.method].push_back(r.assessment);
  for (auto& [name, bundles] : by_method) report.aggregates[name] = aggregate_trials(bundles);
  return report;
}

inline nlohmann::json assessment_to_json(const AssessmentBundle& b) {
  nlohmann::json j;
  j["confusion"] = {{"tp", b.confusion.tp}, {"fp", b.confusion.fp},
                    {"fn", b.confusion.fn}, {"tn", b.confusion.tn}};
  j["f_score"] = b.f_score;
  j["oa"] = b.oa;
  j["kappa"] = b.kappa;
  j["pa"] = b.pa;
  j["ua"] = b.ua;
  j["commission"] = b.commission;
  j["omission"] = b.omission;
  if (b.f_pb) j["f_pb"] = *b.f_pb;
  j["degenerate"] = b.degenerate;
  return j;
}

inline nlohmann::json summary_stats_to_json(const SummaryStats& s) {
  return {{"mean", s.mean}, {"std", s.stddev}, {"min", s.min}, {"q1", s.q1},
          {"median", s.median}, {"q3", s.q3}, {"max", s.max}};
}

inline nlohmann::json report_to_json(const BenchmarkReport& report) {
  nlohmann::json j;
  j["schema"] = 1;
  j["config"] = report.config_echo;
  j["trials"] = nlohmann::json::array();
  for (const TrialRecord& r : report.trials) {
    nlohmann::json t;
    t["trial"] = r.trial;
    t["method"] = r.method;
    t["complete"] = r.complete;
    if (r.complete) t["assessment"] = assessment_to_json(r.assessment);
    if (!r.error.empty()) t["error"] = r.error;
    if (r.tune) t["tune"] = *r.tune;
    t["train_seconds"] = r.train_seconds;
    t["predict_seconds"] = r.predict_seconds;
    j["trials"].push_back(std::move(t));
  }
  j["aggregates"] = nlohmann::json::object();
  for (const auto& [method, metrics] : report.aggregates) {
    nlohmann::json m;
    for (const auto& [metric, stats] : metrics) m[metric] = summary_stats_to_json(stats);
    j["aggregates"][method] = std::move(m);
  }
  return j;
}

inline std::string report_to_csv(const BenchmarkReport& report) {
  std::string csv =
      "trial,method,f_score,f_pb,oa,kappa,pa,ua,commission,omission,train_seconds\n";
  for (const TrialRecord& r : report.trials) {
    csv += std::to_string(r.trial) + "," + r.method + ",";
    if (r.complete) {
      const AssessmentBundle& b = r.assessment;
      csv += detail::format_double(b.f_score) + ",";
      csv += (b.f_pb ? detail::format_double(*b.f_pb) : "") + std::string(",");
      csv += detail::format_double(b.oa) + "," + detail::format_double(b.kappa) + ",";
      csv += detail::format_double(b.pa) + "," + detail::format_double(b.ua) + ",";
      csv += detail::format_double(b.commission) + "," + detail::format_double(b.omission) + ",";
      csv += detail::format_double(r.train_seconds);
    } else {
      csv += ",,,,,,,,";
    }
    csv += "\n";
  }
  return csv;
}

/// Writes whole files via a temp-then-rename so readers never observe a
/// partial report.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

enum class ReportFormat { json, csv };

/// Emits report.json and/or report.csv under `dir`; returns the paths.
inline std::vector<std::filesystem::path> emit_report(
    const BenchmarkReport& report, const std::filesystem::path& dir,
    std::initializer_list<ReportFormat> formats = {ReportFormat::json, ReportFormat::csv}) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  for (ReportFormat f : formats) {
    if (f == ReportFormat::json) {
      const auto p = dir / "report.json";
      write_file_atomic(p, report_to_json(report).dump(2) + "\n");
      written.push_back(p);
    } else {
      const auto p = dir / "report.csv";
      write_file_atomic(p, report_to_csv(report));
      written.push_back(p);
    }
  }
  return written;
}

/// Box plot straight from a saved report.json, one box per method in the
/// config's method order.
inline std::string render_boxplot_from_report(const nlohmann::json& report,
                                              const std::string& metric) {
  bool known = false;
  for (const std::string& m : metric_names()) known = known || m == metric;
  if (!known) {
    std::string valid;
    for (const std::string& m : metric_names()) valid += (valid.empty() ? "" : ", ") + m;
    throw std::invalid_argument("unknown metric '" + metric + "' (valid: " + valid + ")");
  }
  std::vector<std::pair<std::string, SummaryStats>> series;
  std::vector<std::string> order;
  for (const auto& m : report.at("config").at("methods"))
    order.push_back(m.at("name").get<std::string>());
  const auto& aggregates = report.at("aggregates");
  for (const std::string& name : order) {
    if (!aggregates.contains(name) || !aggregates.at(name).contains(metric)) continue;
    const auto& s = aggregates.at(name).at(metric);
    SummaryStats st;
    st.mean = s.at("mean").get<double>();
    st.stddev = s.at("std").get<double>();
    st.min = s.at("min").get<double>();
    st.q1 = s.at("q1").get<double>();
    st.median = s.at("median").get<double>();
    st.q3 = s.at("q3").get<double>();
    st.max = s.at("max").get<double>();
    series.push_back({name, st});
  }
  if (series.empty())
    throw std::invalid_argument("report has no aggregates for metric " + metric);
  return render_boxplot_svg(series, metric);
}

/// The frozen desk-scale benchmark: scene-a data, all seven methods at
/// their defaults, 10 trials.
inline ExperimentConfig scene_a_benchmark_config() {
  ExperimentConfig cfg;
  cfg.seed = scene_a_seed;
  cfg.scene = scene_a_spec();
  cfg.scene_seed = scene_a_seed;
  cfg.sampling.n_positive = 400;
  cfg.sampling.n_background = 3200;
  cfg.sampling.n_negative = 3200;
  cfg.sampling.n_trials = 10;
  cfg.threshold = 0.5;
  cfg.methods = {{"pbl", nlohmann::json::object(), std::nullopt},
                 {"pul", nlohmann::json::object(), std::nullopt},
                 {"maxent", nlohmann::json::object(), std::nullopt},
                 {"ocsvm", nlohmann::json::object(), std::nullopt},
                 {"bsvm", nlohmann::json::object(), std::nullopt},
                 {"ann", nlohmann::json::object(), std::nullopt},
                 {"svm", nlohmann::json::object(), std::nullopt}};
  return cfg;
}

}  // namespace occ
