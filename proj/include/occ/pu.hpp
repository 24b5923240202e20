#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>

#include "occ/data.hpp"
#include "occ/logistic.hpp"
#include "occ/mlp.hpp"
#include "occ/sampling.hpp"
#include "occ/soft_model.hpp"

namespace occ {

/// The labeling constant c = p1 / (p1 + p2): the probability that a true
/// presence shows up as an observed positive. Estimated as the mean base
/// score over held-out observed positives.
struct CEstimate {
  double c = 1.0;
  std::size_t n_validation_positives = 0;
  static constexpr const char* method = "mean_score_on_positives";
};

inline constexpr double c_floor = 1e-6;  // keeps the corrections finite

inline CEstimate estimate_c(const TrainedSoftModel& base, const Dataset& validation_positives) {
  if (validation_positives.empty())
    throw std::invalid_argument("estimate_c: empty validation set");
  double sum = 0.0;
  for (const Sample& s : validation_positives.samples) {
    if (s.label.observed != Observed::positive)
      throw std::invalid_argument("estimate_c: sample " + s.id + " is not an observed positive");
    sum += base.predict_score(s.features);
  }
  CEstimate est;
  est.n_validation_positives = validation_positives.size();
  est.c = std::clamp(sum / static_cast<double>(validation_positives.size()), c_floor, 1.0);
  return est;
}

/// Presence probability from a presence/unlabeled score: score / c,
/// clamped into [0, 1].
inline double correct_pul(double score, double c) {
  if (!(c > 0.0)) throw std::invalid_argument("correct_pul: c must be > 0");
  return std::min(score / c, 1.0);
}

/// Presence probability from a presence/background score:
/// ((1 - c) / c) * score / (1 - score), clamped into [0, 1]. A score of
/// exactly 1 saturates to 1 by continuity.
inline double correct_pbl(double score, double c) {
  if (!(c > 0.0)) throw std::invalid_argument("correct_pbl: c must be > 0");
  if (score >= 1.0) return 1.0;
  const double odds = score / (1.0 - score);
  return std::min((1.0 - c) / c * odds, 1.0);
}

enum class PuVariant { pul, pbl };

inline const char* to_string(PuVariant v) { return v == PuVariant::pul ? "pul" : "pbl"; }

/// A presence/background base scorer wrapped with the correction that
/// turns its output into P(y=1 | x), thresholded at 0.5 by default.
struct PuModel {
  TrainedSoftModel base;
  CEstimate c_hat;
  PuVariant variant = PuVariant::pbl;
  double threshold = 0.5;

  double corrected_score(std::span<const double> x) const {
    const double s = base.predict_score(x);
    return variant == PuVariant::pul ? correct_pul(s, c_hat.c) : correct_pbl(s, c_hat.c);
  }

  /// (presence probability, presence?). Ties at the threshold are presence.
  std::pair<double, bool> classify(std::span<const double> x) const {
    const double p = corrected_score(x);
    return {p, p >= threshold};
  }
};

enum class SoftBaseKind { mlp, logistic };

/// Trains the full PU pipeline: holds out `holdout_fraction` of the
/// combined training data (stratified), fits the base on the remainder
/// (positives as 1, background as 0), and estimates c on the held-out
/// positives only, so the estimator never averages over rows the base
/// was fit to.
inline PuModel train_pu(const Dataset& positives, const Dataset& background,
                        PuVariant variant, const MlpConfig& cfg,
                        double holdout_fraction = 0.25,
                        SoftBaseKind base_kind = SoftBaseKind::mlp,
                        double threshold = 0.5) {
  if (positives.empty()) throw std::invalid_argument("train_pu: empty positive set");
  if (background.empty()) throw std::invalid_argument("train_pu: empty background set");
  if (!(threshold > 0.0 && threshold < 1.0))
    throw std::invalid_argument("train_pu: threshold must be in (0,1)");

  Dataset combined;
  combined.feature_names = positives.feature_names;
  combined.samples.reserve(positives.size() + background.size());
  for (const Sample& s : positives.samples) combined.samples.push_back(s);
  for (const Sample& s : background.samples) combined.samples.push_back(s);

  auto [train_part, validation_part] =
      holdout_split(combined, holdout_fraction, Rng::mix(cfg.seed, 0x9a17));

  std::vector<int> targets;
  targets.reserve(train_part.size());
  for (const Sample& s : train_part.samples)
    targets.push_back(s.label.observed == Observed::positive ? 1 : 0);

  TrainedSoftModel base = base_kind == SoftBaseKind::mlp
                              ? train_mlp(train_part, targets, cfg)
                              : train_logistic(train_part, targets, cfg.l2_penalty, cfg.seed);

  Dataset validation_positives = partition_by_label(validation_part).positives;
  if (validation_positives.empty())
    throw std::runtime_error("train_pu: holdout produced no validation positives");

  PuModel m;
  m.c_hat = estimate_c(base, validation_positives);
  m.base = std::move(base);
  m.variant = variant;
  m.threshold = threshold;
  return m;
}

}  // namespace occ
