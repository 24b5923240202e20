#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "occ/data.hpp"

namespace occ {

/// Confusion counts against positive/background labels instead of ground
/// truth: s is the observed state, y' the prediction.
struct PbConfusion {
  double tp_prime = 0;            // s=1, y'=1
  double fn_prime = 0;            // s=1, y'=0
  double fp_prime = 0;            // s=0, y'=1
  double background_negative = 0; // s=0, y'=0

  double total() const { return tp_prime + fn_prime + fp_prime + background_negative; }
};

/// Builds counts with the target class as positive. `reference` and
/// `predicted` hold 1 for presence, 0 for absence.
inline ConfusionCounts confusion_from_predictions(const std::vector<int>& reference,
                                                  const std::vector<int>& predicted) {
  if (reference.size() != predicted.size() || reference.empty())
    throw std::invalid_argument("confusion_from_predictions: aligned non-empty vectors required");
  ConfusionCounts c;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    if (reference[i]) {
      predicted[i] ? ++c.tp : ++c.fn;
    } else {
      predicted[i] ? ++c.fp : ++c.tn;
    }
  }
  return c;
}

// Degenerate denominators yield 0 with the flag set (never NaN), so search
// objectives stay totally ordered.

inline double f_score(const ConfusionCounts& c, bool& degenerate) {
  const double den = 2.0 * c.tp + c.fn + c.fp;
  degenerate = den <= 0;
  return degenerate ? 0.0 : 2.0 * c.tp / den;
}

inline double f_pb(const PbConfusion& c, bool& degenerate) {
  const double den = c.tp_prime + c.fn_prime + c.fp_prime;
  degenerate = den <= 0;
  return degenerate ? 0.0 : 2.0 * c.tp_prime / den;
}

inline double overall_accuracy(const ConfusionCounts& c, bool& degenerate) {
  const double n = c.total();
  degenerate = n <= 0;
  return degenerate ? 0.0 : (c.tp + c.tn) / n;
}

inline double producer_accuracy(const ConfusionCounts& c, bool& degenerate) {
  const double den = c.tp + c.fn;
  degenerate = den <= 0;
  return degenerate ? 0.0 : c.tp / den;
}

inline double user_accuracy(const ConfusionCounts& c, bool& degenerate) {
  const double den = c.tp + c.fp;
  degenerate = den <= 0;
  return degenerate ? 0.0 : c.tp / den;
}

inline double kappa(const ConfusionCounts& c, bool& degenerate) {
  const double n = c.total();
  if (n <= 0) {
    degenerate = true;
    return 0.0;
  }
  const double po = (c.tp + c.tn) / n;
  const double actual_pos = (c.tp + c.fn) / n, predicted_pos = (c.tp + c.fp) / n;
  const double pe = actual_pos * predicted_pos + (1.0 - actual_pos) * (1.0 - predicted_pos);
  if (1.0 - pe <= 0.0) {
    degenerate = true;
    return 0.0;
  }
  degenerate = false;
  return (po - pe) / (1.0 - pe);
}

// Flag-free conveniences.
inline double f_score(const ConfusionCounts& c) { bool d; return f_score(c, d); }
inline double f_pb(const PbConfusion& c) { bool d; return f_pb(c, d); }
inline double overall_accuracy(const ConfusionCounts& c) { bool d; return overall_accuracy(c, d); }
inline double producer_accuracy(const ConfusionCounts& c) { bool d; return producer_accuracy(c, d); }
inline double user_accuracy(const ConfusionCounts& c) { bool d; return user_accuracy(c, d); }
inline double kappa(const ConfusionCounts& c) { bool d; return kappa(c, d); }

/// One trial's full accuracy assessment.
struct AssessmentBundle {
  ConfusionCounts confusion;
  double f_score = 0, oa = 0, kappa = 0, pa = 0, ua = 0, commission = 0, omission = 0;
  std::optional<double> f_pb;  // present when a background evaluation ran
  bool degenerate = false;     // any metric hit a zero denominator
};

inline AssessmentBundle assess(const ConfusionCounts& c,
                               std::optional<PbConfusion> pb = std::nullopt) {
  AssessmentBundle b;
  b.confusion = c;
  bool d1, d2, d3, d4, d5;
  b.f_score = occ::f_score(c, d1);
  b.oa = occ::overall_accuracy(c, d2);
  b.kappa = occ::kappa(c, d3);
  b.pa = occ::producer_accuracy(c, d4);
  b.ua = occ::user_accuracy(c, d5);
  b.commission = 1.0 - b.ua;
  b.omission = 1.0 - b.pa;
  b.degenerate = d1 || d2 || d3 || d4 || d5;
  if (pb) {
    bool d6;
    b.f_pb = occ::f_pb(*pb, d6);
    b.degenerate = b.degenerate || d6;
  }
  return b;
}

/// Box-plot statistics for one metric across trials. Quartiles use the
/// inclusive linear-interpolation rule: the q-quantile sits at rank
/// q * (n - 1) of the sorted values, interpolated between neighbors.
struct SummaryStats {
  double mean = 0, stddev = 0, min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
};

inline double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) throw std::invalid_argument("quantile: empty input");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

inline SummaryStats summarize(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("summarize: empty input");
  SummaryStats s;
  const double n = static_cast<double>(values.size());
  for (double v : values) s.mean += v;
  s.mean /= n;
  if (values.size() > 1) {
    double ss = 0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(ss / (n - 1.0));
  }
  std::sort(values.begin(), values.end());
  s.min = values.front();
  s.max = values.back();
  s.q1 = quantile_sorted(values, 0.25);
  s.median = quantile_sorted(values, 0.5);
  s.q3 = quantile_sorted(values, 0.75);
  return s;
}

inline const std::vector<std::string>& metric_names() {
  static const std::vector<std::string> names = {
      "f_score", "f_pb", "oa", "kappa", "pa", "ua", "commission", "omission"};
  return names;
}

/// Per-metric summary across trials; f_pb is aggregated over the bundles
/// that carry it.
inline std::map<std::string, SummaryStats> aggregate_trials(
    const std::vector<AssessmentBundle>& bundles) {
  if (bundles.empty()) throw std::invalid_argument("aggregate_trials: no bundles");
  std::map<std::string, std::vector<double>> columns;
  for (const AssessmentBundle& b : bundles) {
    columns["f_score"].push_back(b.f_score);
    columns["oa"].push_back(b.oa);
    columns["kappa"].push_back(b.kappa);
    columns["pa"].push_back(b.pa);
    columns["ua"].push_back(b.ua);
    columns["commission"].push_back(b.commission);
    columns["omission"].push_back(b.omission);
    if (b.f_pb) columns["f_pb"].push_back(*b.f_pb);
  }
  std::map<std::string, SummaryStats> out;
  for (auto& [name, vals] : columns)
    if (!vals.empty()) out[name] = summarize(std::move(vals));
  return out;
}

}  // namespace occ
