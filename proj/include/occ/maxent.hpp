#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "occ/data.hpp"
#include "occ/soft_model.hpp"

namespace occ {

/// Approximate maximum-entropy presence/background model: an
/// L1-regularized logistic fit over a deterministic feature expansion,
/// with logistic-scale output.
struct MaxentConfig {
  bool linear = true;  // must stay on
  bool quadratic = true;
  bool product = false;
  double l1_penalty = 1e-4;
  std::size_t max_iterations = 2000;
  double tolerance = 1e-6;  // gradient-map sup-norm stop
  std::uint64_t seed = 0;   // unused by the convex fit; kept for config parity
};

inline std::size_t expanded_dim(std::size_t k, const MaxentConfig& cfg) {
  std::size_t d = k;  // linear block always present
  if (cfg.quadratic) d += k;
  if (cfg.product) d += k * (k - 1) / 2;
  return d;
}

/// Fixed expansion order: linear block, quadratic block (x_i^2), product
/// block (x_i * x_j for i < j, lexicographic by (i, j)).
inline FeatureVector expand_features(std::span<const double> x, const MaxentConfig& cfg) {
  if (!cfg.linear) throw std::invalid_argument("MaxentConfig: linear features are required");
  FeatureVector z;
  z.reserve(expanded_dim(x.size(), cfg));
  z.assign(x.begin(), x.end());
  if (cfg.quadratic)
    for (double v : x) z.push_back(v * v);
  if (cfg.product)
    for (std::size_t i = 0; i < x.size(); ++i)
      for (std::size_t j = i + 1; j < x.size(); ++j) z.push_back(x[i] * x[j]);
  return z;
}

class MaxentModel : public SoftModel {
 public:
  MaxentModel(MaxentConfig cfg, std::size_t input_dim, std::vector<double> weights,
              double bias)
      : cfg_(cfg), input_dim_(input_dim), weights_(std::move(weights)), bias_(bias) {}

  double predict_score(std::span<const double> x) const override {
    const FeatureVector z = expand_features(x, cfg_);
    double s = bias_;
    for (std::size_t i = 0; i < z.size(); ++i) s += weights_[i] * z[i];
    return detail::sigmoid(s);
  }
  std::size_t input_dim() const override { return input_dim_; }
  std::string kind() const override { return "maxent"; }
  const std::vector<double>& weights() const { return weights_; }
  double bias() const { return bias_; }
  const MaxentConfig& config() const { return cfg_; }

  std::size_t nonzero_weights() const {
    return static_cast<std::size_t>(
        std::count_if(weights_.begin(), weights_.end(), [](double w) { return w != 0.0; }));
  }

  nlohmann::json to_json() const override {
    return {{"schema", 1},
            {"kind", kind()},
            {"input_dim", input_dim_},
            {"expansion",
             {{"linear", cfg_.linear}, {"quadratic", cfg_.quadratic}, {"product", cfg_.product}}},
            {"l1_penalty", cfg_.l1_penalty},
            {"weights", weights_},
            {"bias", bias_}};
  }
  static std::shared_ptr<MaxentModel> from_json(const nlohmann::json& j) {
    MaxentConfig cfg;
    cfg.linear = j.at("expansion").at("linear").get<bool>();
    cfg.quadratic = j.at("expansion").at("quadratic").get<bool>();
    cfg.product = j.at("expansion").at("product").get<bool>();
    cfg.l1_penalty = j.value("l1_penalty", 0.0);
    return std::make_shared<MaxentModel>(cfg, j.at("input_dim").get<std::size_t>(),
                                         j.at("weights").get<std::vector<double>>(),
                                         j.at("bias").get<double>());
  }

 private:
  MaxentConfig cfg_;
  std::size_t input_dim_;
  std::vector<double> weights_;
  double bias_;
};

/// Presence-vs-background fit by proximal gradient (ISTA with backtracking):
/// minimize mean cross-entropy + l1 * ||w||_1 (bias unpenalized). The
/// regularized objective is non-increasing across iterations; convergence
/// means the gradient-map sup-norm fell below cfg.tolerance, otherwise the
/// run stops at max_iterations with converged = false.
inline TrainedSoftModel train_maxent(const Dataset& positives, const Dataset& background,
                                     const MaxentConfig& cfg) {
  if (positives.empty() || background.empty())
    throw std::invalid_argument("train_maxent: both sets must be non-empty");
  if (!cfg.linear) throw std::invalid_argument("MaxentConfig: linear features are required");

  const std::size_t k = positives.feature_count();
  const std::size_t d = expanded_dim(k, cfg);
  const std::size_t n = positives.size() + background.size();
  const double inv_n = 1.0 / static_cast<double>(n);

  FeatureMatrix z;
  z.rows = n;
  z.cols = d;
  z.a.reserve(n * d);
  std::vector<double> targets;
  targets.reserve(n);
  for (const Dataset* part : {&positives, &background}) {
    const double t = part == &positives ? 1.0 : 0.0;
    for (const Sample& s : part->samples) {
      if (s.features.size() != k)
        throw std::invalid_argument("train_maxent: inconsistent feature arity at " + s.id);
      const FeatureVector e = expand_features(s.features, cfg);
      z.a.insert(z.a.end(), e.begin(), e.end());
      targets.push_back(t);
    }
  }

  std::vector<double> w(d, 0.0);
  double bias = 0.0;

  auto smooth_loss = [&](const std::vector<double>& wv, double bv) {
    double loss = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
      auto row = z.row(s);
      double zz = bv;
      for (std::size_t i = 0; i < d; ++i) zz += wv[i] * row[i];
      loss += detail::bce_logit(zz, targets[s]) * inv_n;
    }
    return loss;
  };
  auto l1_norm = [&](const std::vector<double>& wv) {
    double s = 0.0;
    for (double v : wv) s += std::abs(v);
    return s;
  };

  std::vector<double> grad(d), gbias(1), cand(d);
  double loss = smooth_loss(w, bias);
  double step = 1.0;
  bool converged = false;
  std::size_t it = 0;

  for (; it < cfg.max_iterations; ++it) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double gb = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
      auto row = z.row(s);
      double zz = bias;
      for (std::size_t i = 0; i < d; ++i) zz += w[i] * row[i];
      const double r = (detail::sigmoid(zz) - targets[s]) * inv_n;
      for (std::size_t i = 0; i < d; ++i) grad[i] += r * row[i];
      gb += r;
    }

    // Backtracking on the proximal step.
    step = std::min(step * 2.0, 1e6);
    double cand_bias = 0.0, cand_loss = 0.0;
    bool accepted = false;
    for (int attempt = 0; attempt < 60; ++attempt) {
      for (std::size_t i = 0; i < d; ++i) {
        const double u = w[i] - step * grad[i];
        const double shrink = step * cfg.l1_penalty;
        cand[i] = u > shrink ? u - shrink : (u < -shrink ? u + shrink : 0.0);
      }
      cand_bias = bias - step * gb;
      cand_loss = smooth_loss(cand, cand_bias);
      // Sufficient-decrease bound for ISTA: f(x+) <= f(x) + g'(x+-x) + ||x+-x||^2/(2t)
      double lin = (cand_bias - bias) * gb, sq = (cand_bias - bias) * (cand_bias - bias);
      for (std::size_t i = 0; i < d; ++i) {
        const double diff = cand[i] - w[i];
        lin += diff * grad[i];
        sq += diff * diff;
      }
      if (cand_loss <= loss + lin + sq / (2.0 * step) + 1e-15) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;

    // Gradient-map sup-norm: the proximal step length scaled by 1/t.
    double gmap = std::abs(cand_bias - bias) / step;
    for (std::size_t i = 0; i < d; ++i)
      gmap = std::max(gmap, std::abs(cand[i] - w[i]) / step);

    w.swap(cand);
    bias = cand_bias;
    loss = cand_loss;
    if (gmap <= cfg.tolerance) {
      converged = true;
      ++it;
      break;
    }
  }

  TrainingSummary summary;
  summary.final_loss = loss + cfg.l1_penalty * l1_norm(w);
  summary.iterations = it;
  summary.converged = converged;
  return {std::make_shared<MaxentModel>(cfg, k, std::move(w), bias), summary};
}

/// Thresholded maxent label, sharing the >= 0.5 tie convention.
inline bool maxent_classify(const TrainedSoftModel& m, std::span<const double> x,
                            double threshold = 0.5) {
  return m.predict_score(x) >= threshold;
}

}  // namespace occ
