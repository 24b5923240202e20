#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "occ/data.hpp"
#include "occ/rng.hpp"

namespace occ {

/// One trial's draw sizes. Defaults follow the 1,000 positive / 15,000
/// background / 15,000 negative protocol with 10 repeated trials.
struct SamplingPlan {
  std::size_t n_positive = 1000;
  std::size_t n_background = 15000;
  std::size_t n_negative = 15000;  // binary baselines only
  std::size_t n_trials = 10;
  std::uint64_t seed = 0;
  bool exclude_observed_positives = false;  // keep drawn positives out of background
};

struct TrainingDraw {
  Dataset positives;   // relabeled Observed::positive, truth kept
  Dataset background;  // relabeled Observed::background, truth hidden
  Dataset negatives;   // relabeled Observed::negative
};

namespace detail {

// Role tags for substream derivation; fixed so trials replicate.
enum StreamRole : std::uint64_t {
  role_positive = 0x01,
  role_background = 0x02,
  role_negative = 0x03,
  role_holdout = 0x04,
};

inline Dataset take(const Dataset& d, const std::vector<std::size_t>& idx) {
  Dataset out;
  out.feature_names = d.feature_names;
  out.samples.reserve(idx.size());
  for (std::size_t i : idx) out.samples.push_back(d.samples[i]);
  return out;
}

}  // namespace detail

/// Draws one trial's training sets from a ground-truth dataset.
/// Positives come uniformly without replacement from true presences;
/// background from the whole dataset (label-blind, so it contains hidden
/// presences at the prevalence rate); negatives from true absences.
/// Deterministic given (plan.seed, trial).
inline TrainingDraw draw_training_sets(const Dataset& d, const SamplingPlan& plan,
                                       std::size_t trial) {
  if (trial >= plan.n_trials)
    throw std::invalid_argument("draw_training_sets: trial index out of range");

  std::vector<std::size_t> presence_idx, absence_idx;
  for (std::size_t i = 0; i < d.samples.size(); ++i) {
    const auto& truth = d.samples[i].label.truth;
    if (!truth) continue;
    (*truth == Truth::presence ? presence_idx : absence_idx).push_back(i);
  }
  if (plan.n_positive > presence_idx.size())
    throw std::runtime_error("draw_training_sets: only " +
                             std::to_string(presence_idx.size()) +
                             " presences available, need " +
                             std::to_string(plan.n_positive));
  if (plan.n_negative > 0 && plan.n_negative > absence_idx.size())
    throw std::runtime_error("draw_training_sets: only " +
                             std::to_string(absence_idx.size()) +
                             " absences available, need " +
                             std::to_string(plan.n_negative));

  Rng pos_rng = Rng::stream(plan.seed, trial, detail::role_positive);
  Rng bg_rng = Rng::stream(plan.seed, trial, detail::role_background);
  Rng neg_rng = Rng::stream(plan.seed, trial, detail::role_negative);

  TrainingDraw out;

  auto pos_pick = sample_without_replacement(presence_idx.size(), plan.n_positive, pos_rng);
  std::vector<std::size_t> pos_rows;
  pos_rows.reserve(pos_pick.size());
  for (std::size_t p : pos_pick) pos_rows.push_back(presence_idx[p]);
  out.positives = detail::take(d, pos_rows);
  for (Sample& s : out.positives.samples) s.label.observed = Observed::positive;

  std::vector<std::size_t> bg_pool;
  if (plan.exclude_observed_positives) {
    std::vector<bool> is_pos(d.samples.size(), false);
    for (std::size_t r : pos_rows) is_pos[r] = true;
    for (std::size_t i = 0; i < d.samples.size(); ++i)
      if (!is_pos[i]) bg_pool.push_back(i);
  } else {
    bg_pool.resize(d.samples.size());
    for (std::size_t i = 0; i < d.samples.size(); ++i) bg_pool[i] = i;
  }
  if (plan.n_background > bg_pool.size())
    throw std::runtime_error("draw_training_sets: background pool too small");
  auto bg_pick = sample_without_replacement(bg_pool.size(), plan.n_background, bg_rng);
  std::vector<std::size_t> bg_rows;
  bg_rows.reserve(bg_pick.size());
  for (std::size_t p : bg_pick) bg_rows.push_back(bg_pool[p]);
  out.background = detail::take(d, bg_rows);
  for (Sample& s : out.background.samples) {
    s.label.observed = Observed::background;
    s.label.truth.reset();  // hidden from every training path
  }

  if (plan.n_negative > 0) {
    auto neg_pick = sample_without_replacement(absence_idx.size(), plan.n_negative, neg_rng);
    std::vector<std::size_t> neg_rows;
    neg_rows.reserve(neg_pick.size());
    for (std::size_t p : neg_pick) neg_rows.push_back(absence_idx[p]);
    out.negatives = detail::take(d, neg_rows);
    for (Sample& s : out.negatives.samples) s.label.observed = Observed::negative;
  } else {
    out.negatives.feature_names = d.feature_names;
  }
  return out;
}

/// Stratified holdout: |validation| = round(fraction * N), with each
/// observed-label stratum represented within one sample of its share.
/// Returns (train_part, validation_part); deterministic given seed.
inline std::pair<Dataset, Dataset> holdout_split(const Dataset& training, double fraction,
                                                 std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0))
    throw std::invalid_argument("holdout_split: fraction must be in (0,1)");
  if (training.empty()) throw std::invalid_argument("holdout_split: empty dataset");

  // Strata in fixed order: positive, background, negative.
  std::vector<std::vector<std::size_t>> strata(3);
  for (std::size_t i = 0; i < training.samples.size(); ++i)
    strata[static_cast<std::size_t>(training.samples[i].label.observed)].push_back(i);

  const std::size_t n = training.size();
  const std::size_t target = static_cast<std::size_t>(std::llround(fraction * n));

  // Largest-remainder apportionment of the target across strata.
  std::size_t allotted = 0;
  std::vector<std::size_t> want(3, 0);
  std::vector<std::pair<double, std::size_t>> remainders;
  for (std::size_t s = 0; s < 3; ++s) {
    const double exact = fraction * static_cast<double>(strata[s].size());
    want[s] = static_cast<std::size_t>(exact);
    allotted += want[s];
    remainders.push_back({exact - static_cast<double>(want[s]), s});
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t r = 0; allotted < target && r < remainders.size(); ++r) {
    const std::size_t s = remainders[r].second;
    if (want[s] < strata[s].size()) {
      ++want[s];
      ++allotted;
    }
  }

  Rng rng = Rng::stream(seed, detail::role_holdout);
  Dataset train_part, val_part;
  train_part.feature_names = training.feature_names;
  val_part.feature_names = training.feature_names;
  std::vector<bool> in_val(n, false);
  for (std::size_t s = 0; s < 3; ++s) {
    if (strata[s].empty()) continue;
    auto pick = sample_without_replacement(strata[s].size(), want[s], rng);
    for (std::size_t p : pick) in_val[strata[s][p]] = true;
  }
  for (std::size_t i = 0; i < n; ++i)
    (in_val[i] ? val_part : train_part).samples.push_back(training.samples[i]);
  return {std::move(train_part), std::move(val_part)};
}

}  // namespace occ
