#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "occ/sampling.hpp"
#include "occ/synth.hpp"
#include "occ/tuning.hpp"

namespace occ {

/// One classifier entry in an experiment: a known method name, optional
/// parameter overrides, and an optional tuner that searches over named
/// parameters before the final fit.
struct MethodSpec {
  std::string name;                       // pbl pul maxent ocsvm bsvm ann svm
  nlohmann::json params = nlohmann::json::object();
  std::optional<nlohmann::json> tuner;    // {"kind":"grid"|"pso", ...}
};

struct ExperimentConfig {
  std::uint64_t seed = 0;
  std::string csv_path;                 // one of csv_path / scene
  std::optional<SceneSpec> scene;
  std::uint64_t scene_seed = scene_a_seed;
  SamplingPlan sampling;
  std::vector<MethodSpec> methods;
  double threshold = 0.5;
  std::string out_dir = "out";
  bool exclude_training_from_eval = false;
  std::size_t workers = 1;
};

inline nlohmann::json scene_spec_to_json(const SceneSpec& s) {
  auto comps = [](const std::vector<GaussianComponent>& cs) {
    nlohmann::json a = nlohmann::json::array();
    for (const GaussianComponent& g : cs)
      a.push_back({{"mean", g.mean}, {"variance", g.variance}, {"weight", g.weight}});
    return a;
  };
  return {{"n_objects", s.n_objects},
          {"n_features", s.n_features},
          {"prevalence", s.prevalence},
          {"separation", s.separation},
          {"presence_components", comps(s.presence_components)},
          {"absence_components", comps(s.absence_components)}};
}

inline SceneSpec scene_spec_from_json(const nlohmann::json& j) {
  if (j.contains("name")) {
    const std::string name = j.at("name").get<std::string>();
    if (name != "scene-a") throw std::runtime_error("unknown scene name: " + name);
    SceneSpec s = scene_a_spec();
    if (j.contains("n_objects")) s.n_objects = j.at("n_objects").get<std::size_t>();
    if (j.contains("separation")) s.separation = j.at("separation").get<double>();
    return s;
  }
  SceneSpec s;
  s.n_objects = j.at("n_objects").get<std::size_t>();
  s.n_features = j.at("n_features").get<std::size_t>();
  s.prevalence = j.at("prevalence").get<double>();
  s.separation = j.value("separation", 1.0);
  auto comps = [](const nlohmann::json& a) {
    std::vector<GaussianComponent> cs;
    for (const auto& g : a)
      cs.push_back({g.at("mean").get<std::vector<double>>(),
                    g.at("variance").get<std::vector<double>>(),
                    g.at("weight").get<double>()});
    return cs;
  };
  s.presence_components = comps(j.at("presence_components"));
  s.absence_components = comps(j.at("absence_components"));
  return s;
}

inline nlohmann::json sampling_plan_to_json(const SamplingPlan& p) {
  return {{"n_positive", p.n_positive},
          {"n_background", p.n_background},
          {"n_negative", p.n_negative},
          {"n_trials", p.n_trials},
          {"exclude_observed_positives", p.exclude_observed_positives}};
}

inline SamplingPlan sampling_plan_from_json(const nlohmann::json& j) {
  SamplingPlan p;
  p.n_positive = j.value("n_positive", p.n_positive);
  p.n_background = j.value("n_background", p.n_background);
  p.n_negative = j.value("n_negative", p.n_negative);
  p.n_trials = j.value("n_trials", p.n_trials);
  p.exclude_observed_positives = j.value("exclude_observed_positives", false);
  return p;
}

inline nlohmann::json experiment_config_to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["seed"] = c.seed;
  if (!c.csv_path.empty()) {
    j["data"] = {{"csv", c.csv_path}};
  } else if (c.scene) {
    j["data"] = {{"scene", scene_spec_to_json(*c.scene)}, {"scene_seed", c.scene_seed}};
  }
  j["sampling"] = sampling_plan_to_json(c.sampling);
  j["methods"] = nlohmann::json::array();
  for (const MethodSpec& m : c.methods) {
    nlohmann::json mj = {{"name", m.name}};
    if (!m.params.empty()) mj["params"] = m.params;
    if (m.tuner) mj["tuner"] = *m.tuner;
    j["methods"].push_back(mj);
  }
  j["threshold"] = c.threshold;
  j["out"] = c.out_dir;
  j["exclude_training_from_eval"] = c.exclude_training_from_eval;
  j["workers"] = c.workers;
  return j;
}

inline ExperimentConfig experiment_config_from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  c.seed = j.value("seed", 0ull);
  if (j.contains("data")) {
    const auto& d = j.at("data");
    if (d.contains("csv")) c.csv_path = d.at("csv").get<std::string>();
    if (d.contains("scene")) {
      c.scene = scene_spec_from_json(d.at("scene"));
      c.scene_seed = d.value("scene_seed", scene_a_seed);
    }
  }
  if (c.csv_path.empty() && !c.scene)
    throw std::runtime_error("config: data must name a csv or a scene");
  if (j.contains("sampling")) c.sampling = sampling_plan_from_json(j.at("sampling"));
  c.sampling.seed = c.seed;
  if (!j.contains("methods") || j.at("methods").empty())
    throw std::runtime_error("config: at least one method required");
  for (const auto& mj : j.at("methods")) {
    MethodSpec m;
    m.name = mj.at("name").get<std::string>();
    if (mj.contains("params")) m.params = mj.at("params");
    if (mj.contains("tuner")) m.tuner = mj.at("tuner");
    c.methods.push_back(std::move(m));
  }
  c.threshold = j.value("threshold", 0.5);
  c.out_dir = j.value("out", std::string("out"));
  c.exclude_training_from_eval = j.value("exclude_training_from_eval", false);
  c.workers = j.value("workers", std::size_t{1});
  return c;
}

inline nlohmann::json tune_result_to_json(const TuneResult& r) {
  nlohmann::json trace = nlohmann::json::array();
  for (const Evaluation& e : r.trace)
    trace.push_back({{"params", e.params}, {"objective", e.objective}});
  return {{"param_names", r.param_names}, {"best_params", r.best_params},
          {"best_objective", r.best_objective}, {"evaluations", r.evaluations},
          {"wall_seconds", r.wall_seconds}, {"trace", trace}};
}

}  // namespace occ
