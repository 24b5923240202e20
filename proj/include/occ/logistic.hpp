#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "occ/soft_model.hpp"

namespace occ {

/// Linear logistic scorer: sigmoid(w . x + b).
class LogisticModel : public SoftModel {
 public:
  LogisticModel(std::vector<double> weights, double bias)
      : weights_(std::move(weights)), bias_(bias) {}

  double predict_score(std::span<const double> x) const override {
    double z = bias_;
    for (std::size_t i = 0; i < weights_.size(); ++i) z += weights_[i] * x[i];
    return detail::sigmoid(z);
  }
  std::size_t input_dim() const override { return weights_.size(); }
  std::string kind() const override { return "logistic"; }
  const std::vector<double>& weights() const { return weights_; }
  double bias() const { return bias_; }

  nlohmann::json to_json() const override {
    return {{"schema", 1}, {"kind", kind()}, {"weights", weights_}, {"bias", bias_}};
  }
  static std::shared_ptr<LogisticModel> from_json(const nlohmann::json& j) {
    return std::make_shared<LogisticModel>(j.at("weights").get<std::vector<double>>(),
                                           j.at("bias").get<double>());
  }

 private:
  std::vector<double> weights_;
  double bias_;
};

namespace detail {

/// In-place Cholesky solve of (A)x = b for symmetric positive definite A
/// (row-major d x d). Returns false if a pivot fails.
inline bool cholesky_solve(std::vector<double>& a, std::vector<double>& b, std::size_t d) {
  for (std::size_t j = 0; j < d; ++j) {
    double diag = a[j * d + j];
    for (std::size_t k = 0; k < j; ++k) diag -= a[j * d + k] * a[j * d + k];
    if (diag <= 0.0) return false;
    const double l = std::sqrt(diag);
    a[j * d + j] = l;
    for (std::size_t i = j + 1; i < d; ++i) {
      double v = a[i * d + j];
      for (std::size_t k = 0; k < j; ++k) v -= a[i * d + k] * a[j * d + k];
      a[i * d + j] = v / l;
    }
  }
  for (std::size_t i = 0; i < d; ++i) {  // L y = b
    double v = b[i];
    for (std::size_t k = 0; k < i; ++k) v -= a[i * d + k] * b[k];
    b[i] = v / a[i * d + i];
  }
  for (std::size_t i = d; i-- > 0;) {  // L^T x = y
    double v = b[i];
    for (std::size_t k = i + 1; k < d; ++k) v -= a[k * d + i] * b[k];
    b[i] = v / a[i * d + i];
  }
  return true;
}

}  // namespace detail

/// Fits mean cross-entropy + 0.5 * l2 * ||w||^2 (bias unpenalized) by
/// damped Newton with step halving. The objective is convex; training
/// runs from zero weights to the global optimum, so the result does not
/// depend on the seed. Converged when the gradient sup-norm is <= tol.
inline TrainedSoftModel train_logistic(const Dataset& data, const std::vector<int>& targets,
                                       double l2_penalty = 1e-4,
                                       [[maybe_unused]] std::uint64_t seed = 0,
                                       double tol = 1e-6, std::size_t max_iter = 200) {
  if (data.empty()) throw std::invalid_argument("train_logistic: empty dataset");
  if (targets.size() != data.size())
    throw std::invalid_argument("train_logistic: targets misaligned with samples");

  const FeatureMatrix x = features_of(data);
  const std::size_t n = x.rows, k = x.cols, d = k + 1;  // bias last
  const double inv_n = 1.0 / static_cast<double>(n);

  std::vector<double> w(d, 0.0);
  auto objective = [&](const std::vector<double>& wv) {
    double loss = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
      auto row = x.row(s);
      double z = wv[k];
      for (std::size_t i = 0; i < k; ++i) z += wv[i] * row[i];
      loss += detail::bce_logit(z, targets[s]) * inv_n;
    }
    for (std::size_t i = 0; i < k; ++i) loss += 0.5 * l2_penalty * wv[i] * wv[i];
    return loss;
  };

  std::vector<double> grad(d), hess(d * d), step(d);
  double loss = objective(w);
  TrainingSummary summary;
  bool converged = false;
  std::size_t it = 0;
  for (; it < max_iter; ++it) {
    std::fill(grad.begin(), grad.end(), 0.0);
    std::fill(hess.begin(), hess.end(), 0.0);
    for (std::size_t s = 0; s < n; ++s) {
      auto row = x.row(s);
      double z = w[k];
      for (std::size_t i = 0; i < k; ++i) z += w[i] * row[i];
      const double p = detail::sigmoid(z);
      const double r = (p - targets[s]) * inv_n;
      const double h = std::max(p * (1.0 - p), 1e-12) * inv_n;
      for (std::size_t i = 0; i < k; ++i) grad[i] += r * row[i];
      grad[k] += r;
      for (std::size_t i = 0; i < k; ++i) {
        const double hxi = h * row[i];
        for (std::size_t j = 0; j <= i; ++j) hess[i * d + j] += hxi * row[j];
        hess[k * d + i] += hxi;
      }
      hess[k * d + k] += h;
    }
    for (std::size_t i = 0; i < k; ++i) {
      grad[i] += l2_penalty * w[i];
      hess[i * d + i] += l2_penalty;
    }
    // mirror lower triangle
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = i + 1; j < d; ++j) hess[i * d + j] = hess[j * d + i];

    double gmax = 0.0;
    for (double g : grad) gmax = std::max(gmax, std::abs(g));
    if (gmax <= tol) {
      converged = true;
      break;
    }

    std::vector<double> a = hess;
    step = grad;
    double damp = 1e-10;
    while (!detail::cholesky_solve(a, step, d)) {
      a = hess;
      step = grad;
      for (std::size_t i = 0; i < d; ++i) a[i * d + i] += damp;
      damp *= 10.0;
      if (damp > 1e6) throw std::runtime_error("train_logistic: singular Hessian");
    }

    double scale = 1.0;
    std::vector<double> cand(d);
    bool accepted = false;
    for (int attempt = 0; attempt < 60; ++attempt) {
      for (std::size_t i = 0; i < d; ++i) cand[i] = w[i] - scale * step[i];
      const double cl = objective(cand);
      if (std::isfinite(cl) && cl <= loss + 1e-15) {
        w = cand;
        loss = cl;
        accepted = true;
        break;
      }
      scale *= 0.5;
    }
    if (!accepted) break;  // step underflow: at numerical optimum
  }

  summary.final_loss = loss;
  summary.iterations = it;
  summary.converged = converged;
  std::vector<double> weights(w.begin(), w.begin() + k);
  return {std::make_shared<LogisticModel>(std::move(weights), w[k]), summary};
}

}  // namespace occ
