#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "occ/data.hpp"

namespace occ {

struct TrainingSummary {
  double final_loss = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

/// A trained scorer producing P(s=1 | x) in [0, 1]. Implementations are
/// immutable after training; predict_score is reentrant.
class SoftModel {
 public:
  virtual ~SoftModel() = default;
  virtual double predict_score(std::span<const double> x) const = 0;
  virtual std::size_t input_dim() const = 0;
  virtual std::string kind() const = 0;
  virtual nlohmann::json to_json() const = 0;
};

/// Value handle for a trained soft classifier plus its training record.
struct TrainedSoftModel {
  std::shared_ptr<const SoftModel> model;
  TrainingSummary summary;

  double predict_score(std::span<const double> x) const {
    if (!model) throw std::logic_error("TrainedSoftModel: empty model");
    if (x.size() != model->input_dim())
      throw std::invalid_argument("predict_score: expected " +
                                  std::to_string(model->input_dim()) +
                                  " features, got " + std::to_string(x.size()));
    return model->predict_score(x);
  }
  std::size_t input_dim() const { return model ? model->input_dim() : 0; }

  nlohmann::json to_json() const {
    nlohmann::json j = model->to_json();
    j["summary"] = {{"final_loss", summary.final_loss},
                    {"iterations", summary.iterations},
                    {"converged", summary.converged}};
    return j;
  }
};

/// Row-major dense view of a dataset's features.
struct FeatureMatrix {
  std::size_t rows = 0, cols = 0;
  std::vector<double> a;

  std::span<const double> row(std::size_t i) const { return {a.data() + i * cols, cols}; }
};

inline FeatureMatrix features_of(const Dataset& d) {
  FeatureMatrix m;
  m.rows = d.size();
  m.cols = d.feature_count();
  m.a.reserve(m.rows * m.cols);
  for (const Sample& s : d.samples) {
    if (s.features.size() != m.cols)
      throw std::invalid_argument("features_of: inconsistent feature arity at sample " + s.id);
    m.a.insert(m.a.end(), s.features.begin(), s.features.end());
  }
  return m;
}

namespace detail {

inline double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

/// Numerically stable binary cross-entropy on the logit scale.
inline double bce_logit(double z, double t) {
  return std::max(z, 0.0) - t * z + std::log1p(std::exp(-std::abs(z)));
}

}  // namespace detail

}  // namespace occ
