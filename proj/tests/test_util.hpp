#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "occ/data.hpp"
#include "occ/rng.hpp"
#include "occ/synth.hpp"

namespace testutil {

inline occ::Sample make_sample(std::string id, std::vector<double> features,
                               occ::Observed observed = occ::Observed::background,
                               std::optional<occ::Truth> truth = std::nullopt) {
  occ::Sample s;
  s.id = std::move(id);
  s.features = std::move(features);
  s.label.observed = observed;
  s.label.truth = truth;
  return s;
}

/// Two well-separated Gaussian blobs in `dim` dimensions; first half of
/// the rows are class 1.
inline std::pair<occ::Dataset, std::vector<int>> two_blobs(std::size_t n_per_class,
                                                           std::size_t dim, double gap,
                                                           std::uint64_t seed) {
  occ::Dataset d;
  for (std::size_t j = 0; j < dim; ++j) d.feature_names.push_back("f" + std::to_string(j + 1));
  std::vector<int> targets;
  occ::Rng rng(seed);
  for (int cls = 1; cls >= 0; --cls) {
    for (std::size_t i = 0; i < n_per_class; ++i) {
      std::vector<double> x(dim);
      for (std::size_t j = 0; j < dim; ++j)
        x[j] = (cls ? gap : 0.0) + 0.25 * rng.next_normal();
      d.samples.push_back(make_sample("s" + std::to_string(d.samples.size()), std::move(x),
                                      cls ? occ::Observed::positive : occ::Observed::negative,
                                      cls ? occ::Truth::presence : occ::Truth::absence));
      targets.push_back(cls);
    }
  }
  return {std::move(d), std::move(targets)};
}

/// A small low-dimensional scene for module tests; scene-a stays with the
/// acceptance suite.
inline occ::SceneSpec mini_scene_spec(std::size_t n_objects = 4000, double separation = 1.0) {
  occ::SceneSpec spec;
  spec.n_objects = n_objects;
  spec.n_features = 6;
  spec.prevalence = 0.3;
  spec.separation = separation;
  occ::GaussianComponent a0{{0, 0, 0, 0, 0, 0}, {1, 1, 1, 1, 1, 1}, 0.5};
  occ::GaussianComponent a1{{0.5, 0.5, 0, 0, 0.5, 0}, {1.2, 1, 1, 1.2, 1, 1}, 0.5};
  occ::GaussianComponent p0{{3, 3, 3, 0.5, 0.5, 0.5}, {1, 1.2, 1, 1, 1, 1.2}, 0.6};
  occ::GaussianComponent p1{{2.6, 3.2, 2.8, 0.8, 0.2, 0.6}, {1, 1, 1.1, 1, 1.2, 1}, 0.4};
  spec.absence_components = {a0, a1};
  spec.presence_components = {p0, p1};
  return spec;
}

inline double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  auto ranks = [](const std::vector<double>& v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return v[i] < v[j]; });
    std::vector<double> r(v.size());
    std::size_t i = 0;
    while (i < order.size()) {  // average ranks over ties
      std::size_t j = i;
      while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
      const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0;
      for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
      i = j + 1;
    }
    return r;
  };
  const std::vector<double> ra = ranks(a), rb = ranks(b);
  const double n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += ra[i];
    mb += rb[i];
  }
  ma /= n;
  mb /= n;
  double num = 0, da = 0, db = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (ra[i] - ma) * (rb[i] - mb);
    da += (ra[i] - ma) * (ra[i] - ma);
    db += (rb[i] - mb) * (rb[i] - mb);
  }
  return num / std::sqrt(da * db);
}

}  // namespace testutil
