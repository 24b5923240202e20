#pragma once

#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "occ/logistic.hpp"
#include "occ/maxent.hpp"
#include "occ/mlp.hpp"
#include "occ/pu.hpp"
#include "occ/svm.hpp"

namespace occ {

inline TrainedSoftModel soft_model_from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  TrainedSoftModel m;
  if (kind == "mlp_ensemble") m.model = MlpEnsembleModel::from_json(j);
  else if (kind == "logistic") m.model = LogisticModel::from_json(j);
  else if (kind == "maxent") m.model = MaxentModel::from_json(j);
  else throw std::runtime_error("model file: unknown soft model kind " + kind);
  if (j.contains("summary")) {
    m.summary.final_loss = j["summary"].value("final_loss", 0.0);
    m.summary.iterations = j["summary"].value("iterations", std::size_t{0});
    m.summary.converged = j["summary"].value("converged", false);
  }
  return m;
}

inline nlohmann::json pu_model_to_json(const PuModel& m) {
  return {{"schema", 1},
          {"kind", "pu"},
          {"variant", to_string(m.variant)},
          {"c_hat", m.c_hat.c},
          {"c_method", CEstimate::method},
          {"n_validation_positives", m.c_hat.n_validation_positives},
          {"threshold", m.threshold},
          {"base", m.base.to_json()}};
}

inline PuModel pu_model_from_json(const nlohmann::json& j) {
  PuModel m;
  const std::string v = j.at("variant").get<std::string>();
  if (v == "pul") m.variant = PuVariant::pul;
  else if (v == "pbl") m.variant = PuVariant::pbl;
  else throw std::runtime_error("pu model file: unknown variant " + v);
  m.c_hat.c = j.at("c_hat").get<double>();
  m.c_hat.n_validation_positives = j.value("n_validation_positives", std::size_t{0});
  m.threshold = j.value("threshold", 0.5);
  m.base = soft_model_from_json(j.at("base"));
  return m;
}

/// Any trained model reloaded from disk, scoreable and thresholdable.
struct LoadedModel {
  std::string kind;  // "pu", "svm", or the soft-model kind
  std::optional<PuModel> pu;
  std::optional<SvmModel> svm;
  std::optional<TrainedSoftModel> soft;

  double score(std::span<const double> x) const {
    if (pu) return pu->corrected_score(x);
    if (svm) return decision_value(*svm, x);
    return soft->predict_score(x);
  }
  /// Presence decision; `threshold` applies to probability-scale models,
  /// SVM decisions use the sign rule.
  bool label(std::span<const double> x, double threshold = 0.5) const {
    if (pu) return pu->classify(x).second;
    if (svm) return predict_label(*svm, x) > 0;
    return soft->predict_score(x) >= threshold;
  }
};

inline LoadedModel load_model_json(const nlohmann::json& j) {
  LoadedModel m;
  m.kind = j.at("kind").get<std::string>();
  if (m.kind == "pu") m.pu = pu_model_from_json(j);
  else if (m.kind == "svm") m.svm = svm_from_json(j);
  else m.soft = soft_model_from_json(j);
  return m;
}

inline LoadedModel load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  nlohmann::json j;
  in >> j;
  return load_model_json(j);
}

}  // namespace occ
