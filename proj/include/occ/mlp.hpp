#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "occ/rng.hpp"
#include "occ/soft_model.hpp"

namespace occ {

/// Backprop network configuration. The default is one hidden layer of 10
/// tanh units with a sigmoid output, trained 5 times from independent seed
/// streams; the model's score is the arithmetic mean of the member outputs.
struct MlpConfig {
  std::size_t hidden_units = 10;
  std::size_t hidden_layers = 1;
  std::size_t ensemble_size = 5;
  std::size_t epochs = 500;
  double learning_rate = 0.01;
  double l2_penalty = 1e-4;
  std::uint64_t seed = 0;
};

class DivergenceError : public std::runtime_error {
 public:
  explicit DivergenceError(const std::string& what) : std::runtime_error(what) {}
};

/// A single feed-forward network with flat weight storage. Layout per
/// layer: weight matrix (out x in), then biases (out). Weights default to
/// zero, which scores 0.5 everywhere.
class MlpNetwork {
 public:
  MlpNetwork(std::size_t input_dim, std::size_t hidden_units, std::size_t hidden_layers)
      : input_dim_(input_dim) {
    if (hidden_units < 1 || hidden_layers < 1)
      throw std::invalid_argument("MlpNetwork: need at least one hidden unit/layer");
    dims_.push_back(input_dim);
    for (std::size_t l = 0; l < hidden_layers; ++l) dims_.push_back(hidden_units);
    dims_.push_back(1);
    std::size_t total = 0;
    for (std::size_t l = 0; l + 1 < dims_.size(); ++l)
      total += dims_[l + 1] * dims_[l] + dims_[l + 1];
    weights_.assign(total, 0.0);
  }

  std::size_t input_dim() const { return input_dim_; }
  std::size_t weight_count() const { return weights_.size(); }
  std::vector<double>& weights() { return weights_; }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<std::size_t>& layer_dims() const { return dims_; }

  void init_random(Rng& rng) {
    std::size_t off = 0;
    for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
      const double bound = 1.0 / std::sqrt(static_cast<double>(dims_[l]));
      const std::size_t n = dims_[l + 1] * dims_[l] + dims_[l + 1];
      for (std::size_t i = 0; i < n; ++i)
        weights_[off + i] = rng.next_uniform(-bound, bound);
      off += n;
    }
  }

  /// Output logit for one sample.
  double logit(std::span<const double> x) const {
    thread_local std::vector<double> buf_a, buf_b;
    buf_a.assign(x.begin(), x.end());
    std::size_t off = 0;
    for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
      const std::size_t in = dims_[l], out = dims_[l + 1];
      buf_b.assign(out, 0.0);
      for (std::size_t o = 0; o < out; ++o) {
        const double* w = weights_.data() + off + o * in;
        double z = weights_[off + out * in + o];  // bias
        for (std::size_t i = 0; i < in; ++i) z += w[i] * buf_a[i];
        buf_b[o] = (l + 2 < dims_.size()) ? std::tanh(z) : z;
      }
      off += out * in + out;
      buf_a.swap(buf_b);
    }
    return buf_a[0];
  }

  double score(std::span<const double> x) const { return detail::sigmoid(logit(x)); }

  /// Mean cross-entropy + 0.5 * l2 * ||W||^2 (biases unpenalized) over a
  /// batch; gradient accumulated into `grad` when non-null.
  double loss_and_grad(const FeatureMatrix& x, const std::vector<double>& targets,
                       double l2, std::vector<double>* grad) const {
    const std::size_t n = x.rows;
    const std::size_t n_layers = dims_.size() - 1;
    if (grad) grad->assign(weights_.size(), 0.0);

    // Layer offsets into the flat weight vector.
    std::vector<std::size_t> off(n_layers);
    for (std::size_t l = 0, o = 0; l < n_layers; ++l) {
      off[l] = o;
      o += dims_[l + 1] * dims_[l] + dims_[l + 1];
    }

    std::vector<std::vector<double>> act(n_layers + 1);
    std::vector<std::vector<double>> delta(n_layers + 1);
    double loss = 0.0;
    const double inv_n = 1.0 / static_cast<double>(n);

    for (std::size_t s = 0; s < n; ++s) {
      auto row = x.row(s);
      act[0].assign(row.begin(), row.end());
      for (std::size_t l = 0; l < n_layers; ++l) {
        const std::size_t in = dims_[l], out = dims_[l + 1];
        act[l + 1].assign(out, 0.0);
        for (std::size_t o = 0; o < out; ++o) {
          const double* w = weights_.data() + off[l] + o * in;
          double z = weights_[off[l] + out * in + o];
          for (std::size_t i = 0; i < in; ++i) z += w[i] * act[l][i];
          act[l + 1][o] = (l + 1 < n_layers) ? std::tanh(z) : z;
        }
      }
      const double z_out = act[n_layers][0];
      const double t = targets[s];
      loss += detail::bce_logit(z_out, t) * inv_n;
      if (!grad) continue;

      delta[n_layers].assign(1, (detail::sigmoid(z_out) - t) * inv_n);
      for (std::size_t l = n_layers; l-- > 0;) {
        const std::size_t in = dims_[l], out = dims_[l + 1];
        double* gw = grad->data() + off[l];
        for (std::size_t o = 0; o < out; ++o) {
          const double dz = delta[l + 1][o];
          double* gwo = gw + o * in;
          for (std::size_t i = 0; i < in; ++i) gwo[i] += dz * act[l][i];
          gw[out * in + o] += dz;
        }
        if (l == 0) break;
        delta[l].assign(in, 0.0);
        for (std::size_t o = 0; o < out; ++o) {
          const double dz = delta[l + 1][o];
          const double* w = weights_.data() + off[l] + o * in;
          for (std::size_t i = 0; i < in; ++i) delta[l][i] += dz * w[i];
        }
        for (std::size_t i = 0; i < in; ++i)
          delta[l][i] *= 1.0 - act[l][i] * act[l][i];  // tanh'
      }
    }

    // L2 on weight matrices only, not biases.
    for (std::size_t l = 0; l < n_layers; ++l) {
      const std::size_t nw = dims_[l + 1] * dims_[l];
      for (std::size_t i = 0; i < nw; ++i) {
        const double w = weights_[off[l] + i];
        loss += 0.5 * l2 * w * w;
        if (grad) (*grad)[off[l] + i] += l2 * w;
      }
    }
    return loss;
  }

 private:
  std::size_t input_dim_;
  std::vector<std::size_t> dims_;
  std::vector<double> weights_;
};

namespace detail {

/// Full-batch gradient descent with step halving on loss increase and
/// doubling recovery between epochs. Deterministic for a given init.
inline TrainingSummary gd_train(MlpNetwork& net, const FeatureMatrix& x,
                                const std::vector<double>& targets, const MlpConfig& cfg) {
  std::vector<double> grad, trial(net.weight_count());
  double loss = net.loss_and_grad(x, targets, cfg.l2_penalty, &grad);
  if (!std::isfinite(loss)) throw DivergenceError("mlp: non-finite initial loss");
  double lr = cfg.learning_rate;
  const double lr_cap = cfg.learning_rate * 64.0;
  TrainingSummary summary;
  std::size_t epoch = 0;
  for (; epoch < cfg.epochs; ++epoch) {
    lr = std::min(lr * 2.0, lr_cap);
    bool stepped = false;
    for (int attempt = 0; attempt < 40; ++attempt) {
      for (std::size_t i = 0; i < trial.size(); ++i)
        trial[i] = net.weights()[i] - lr * grad[i];
      std::swap(net.weights(), trial);
      const double cand = net.loss_and_grad(x, targets, cfg.l2_penalty, nullptr);
      if (!std::isfinite(cand)) throw DivergenceError("mlp: non-finite loss during training");
      if (cand <= loss + 1e-12) {
        loss = cand;
        stepped = true;
        break;
      }
      std::swap(net.weights(), trial);  // reject
      lr *= 0.5;
    }
    if (!stepped) break;  // no descent direction step representable: converged
    net.loss_and_grad(x, targets, cfg.l2_penalty, &grad);
  }
  summary.final_loss = loss;
  summary.iterations = epoch;
  summary.converged = epoch < cfg.epochs;
  return summary;
}

}  // namespace detail

/// Ensemble of independently trained networks; score = mean member score.
class MlpEnsembleModel : public SoftModel {
 public:
  MlpEnsembleModel(std::vector<MlpNetwork> members, MlpConfig cfg)
      : members_(std::move(members)), cfg_(std::move(cfg)) {
    if (members_.empty()) throw std::invalid_argument("MlpEnsembleModel: no members");
  }

  double predict_score(std::span<const double> x) const override {
    double s = 0.0;
    for (const MlpNetwork& m : members_) s += m.score(x);
    return s / static_cast<double>(members_.size());
  }
  std::size_t input_dim() const override { return members_.front().input_dim(); }
  std::string kind() const override { return "mlp_ensemble"; }
  const std::vector<MlpNetwork>& members() const { return members_; }
  const MlpConfig& config() const { return cfg_; }

  nlohmann::json to_json() const override {
    nlohmann::json j;
    j["schema"] = 1;
    j["kind"] = kind();
    j["input_dim"] = input_dim();
    j["hidden_units"] = cfg_.hidden_units;
    j["hidden_layers"] = cfg_.hidden_layers;
    j["members"] = nlohmann::json::array();
    for (const MlpNetwork& m : members_) j["members"].push_back(m.weights());
    return j;
  }

  static std::shared_ptr<MlpEnsembleModel> from_json(const nlohmann::json& j) {
    MlpConfig cfg;
    cfg.hidden_units = j.at("hidden_units").get<std::size_t>();
    cfg.hidden_layers = j.at("hidden_layers").get<std::size_t>();
    const std::size_t input_dim = j.at("input_dim").get<std::size_t>();
    std::vector<MlpNetwork> members;
    for (const auto& w : j.at("members")) {
      MlpNetwork net(input_dim, cfg.hidden_units, cfg.hidden_layers);
      net.weights() = w.get<std::vector<double>>();
      if (net.weights().size() != net.weight_count())
        throw std::runtime_error("mlp_ensemble: weight count mismatch in model file");
      members.push_back(std::move(net));
    }
    cfg.ensemble_size = members.size();
    return std::make_shared<MlpEnsembleModel>(std::move(members), cfg);
  }

 private:
  std::vector<MlpNetwork> members_;
  MlpConfig cfg_;
};

/// Trains the ensemble: members are initialized from substreams
/// (cfg.seed, member index) and combined in member-rank order, so the
/// result does not depend on scheduling.
inline TrainedSoftModel train_mlp(const Dataset& data, const std::vector<int>& targets,
                                  const MlpConfig& cfg) {
  if (data.empty()) throw std::invalid_argument("train_mlp: empty dataset");
  if (targets.size() != data.size())
    throw std::invalid_argument("train_mlp: targets misaligned with samples");
  if (cfg.ensemble_size < 1) throw std::invalid_argument("train_mlp: ensemble_size >= 1");

  const FeatureMatrix x = features_of(data);
  std::vector<double> t(targets.begin(), targets.end());

  std::vector<MlpNetwork> members;
  members.reserve(cfg.ensemble_size);
  TrainingSummary summary;
  for (std::size_t m = 0; m < cfg.ensemble_size; ++m) {
    MlpNetwork net(x.cols, cfg.hidden_units, cfg.hidden_layers);
    Rng rng = Rng::stream(cfg.seed, 0x317b, m);
    net.init_random(rng);
    const TrainingSummary s = detail::gd_train(net, x, t, cfg);
    summary.final_loss += s.final_loss / static_cast<double>(cfg.ensemble_size);
    summary.iterations = std::max(summary.iterations, s.iterations);
    summary.converged = m == 0 ? s.converged : (summary.converged && s.converged);
    members.push_back(std::move(net));
  }
  return {std::make_shared<MlpEnsembleModel>(std::move(members), cfg), summary};
}

/// Compares the analytic gradient with central finite differences
/// (step 1e-5) over every weight of a randomly initialized network.
/// Returns max_i |g_a - g_fd| / max(1, |g_a|, |g_fd|).
inline double gradient_check(const MlpConfig& cfg, const Dataset& batch,
                             const std::vector<int>& targets) {
  if (batch.size() > 32) throw std::invalid_argument("gradient_check: batch must be <= 32");
  const FeatureMatrix x = features_of(batch);
  std::vector<double> t(targets.begin(), targets.end());

  MlpNetwork net(x.cols, cfg.hidden_units, cfg.hidden_layers);
  Rng rng = Rng::stream(cfg.seed, 0x9c4d);
  net.init_random(rng);

  std::vector<double> analytic;
  net.loss_and_grad(x, t, cfg.l2_penalty, &analytic);

  const double h = 1e-5;
  double worst = 0.0;
  for (std::size_t i = 0; i < net.weight_count(); ++i) {
    const double w0 = net.weights()[i];
    net.weights()[i] = w0 + h;
    const double up = net.loss_and_grad(x, t, cfg.l2_penalty, nullptr);
    net.weights()[i] = w0 - h;
    const double dn = net.loss_and_grad(x, t, cfg.l2_penalty, nullptr);
    net.weights()[i] = w0;
    const double fd = (up - dn) / (2.0 * h);
    const double denom = std::max({1.0, std::abs(analytic[i]), std::abs(fd)});
    worst = std::max(worst, std::abs(analytic[i] - fd) / denom);
  }
  return worst;
}

}  // namespace occ
