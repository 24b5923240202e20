#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace occ {

/// One object's feature row. Values are dimensionless and, after min-max
/// normalization, lie in [0, 1].
using FeatureVector = std::vector<double>;

/// What the labeling process said about a sample.
enum class Observed {
  positive,    // labeled member of the target class
  background,  // unlabeled; may be presence or absence
  negative,    // labeled non-member (supervised baselines only)
};

/// Ground truth, when known.
enum class Truth { presence, absence };

struct LabelState {
  Observed observed = Observed::background;
  std::optional<Truth> truth;  // hidden from training paths, used for evaluation
};

struct Sample {
  std::string id;
  FeatureVector features;
  LabelState label;
};

struct Dataset {
  std::vector<Sample> samples;
  std::vector<std::string> feature_names;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  std::size_t feature_count() const {
    return samples.empty() ? feature_names.size() : samples.front().features.size();
  }
};

/// 2x2 confusion counts for the target (presence) class. Works with raw
/// counts or with proportions; every derived metric is scale invariant.
struct ConfusionCounts {
  double tp = 0, fp = 0, fn = 0, tn = 0;

  double total() const { return tp + fp + fn + tn; }

  ConfusionCounts normalized() const {
    const double n = total();
    if (n <= 0) return *this;
    return {tp / n, fp / n, fn / n, tn / n};
  }
};

struct Violation {
  std::string sample_id;  // empty for dataset-level rules
  std::string rule;
  std::string detail;
};

/// Checks dataset invariants: unique ids, consistent feature arity,
/// finite values, [0,1] range (when expect_normalized), and that an
/// observed positive never carries an absence truth. Violations are data,
/// not failures.
inline std::vector<Violation> validate_dataset(const Dataset& d,
                                               bool expect_normalized = true) {
  std::vector<Violation> out;
  std::unordered_set<std::string> seen;
  seen.reserve(d.samples.size());
  const std::size_t k = d.feature_names.empty() && !d.samples.empty()
                            ? d.samples.front().features.size()
                            : d.feature_names.size();
  for (const Sample& s : d.samples) {
    if (!seen.insert(s.id).second)
      out.push_back({s.id, "duplicate-id", "sample id occurs more than once"});
    if (s.features.size() != k)
      out.push_back({s.id, "feature-arity",
                     "expected " + std::to_string(k) + " features, got " +
                         std::to_string(s.features.size())});
    for (std::size_t j = 0; j < s.features.size(); ++j) {
      const double v = s.features[j];
      if (!std::isfinite(v)) {
        out.push_back({s.id, "non-finite-feature", "feature " + std::to_string(j)});
      } else if (expect_normalized && (v < 0.0 || v > 1.0)) {
        out.push_back({s.id, "feature-range",
                       "feature " + std::to_string(j) + " = " + std::to_string(v) +
                           " outside [0,1]"});
      }
    }
    if (s.label.observed == Observed::positive && s.label.truth &&
        *s.label.truth == Truth::absence)
      out.push_back({s.id, "observed-positive-absence",
                     "observed positive marked as true absence"});
  }
  return out;
}

struct LabelPartition {
  Dataset positives;
  Dataset background;
  Dataset negatives;
};

/// Splits by observed label, preserving order. Every sample lands in
/// exactly one part; the union equals the input.
inline LabelPartition partition_by_label(const Dataset& d) {
  LabelPartition p;
  p.positives.feature_names = d.feature_names;
  p.background.feature_names = d.feature_names;
  p.negatives.feature_names = d.feature_names;
  for (const Sample& s : d.samples) {
    switch (s.label.observed) {
      case Observed::positive: p.positives.samples.push_back(s); break;
      case Observed::background: p.background.samples.push_back(s); break;
      case Observed::negative: p.negatives.samples.push_back(s); break;
    }
  }
  return p;
}

}  // namespace occ
