#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "occ/data.hpp"
#include "occ/metrics.hpp"
#include "occ/rng.hpp"

namespace occ {

struct GridAxis {
  std::string name;
  enum class Scale { log2, linear } scale = Scale::log2;
  double lo = 0, hi = 0;   // inclusive bounds (for log2: the actual values, e.g. 2^-10 and 2^10)
  std::size_t steps = 11;
};

struct GridSpec {
  std::vector<GridAxis> axes;
};

/// The axis values in evaluation order. log2 axes space exponents evenly;
/// the default 11-step [2^-10, 2^10] axis lands on even integer exponents.
inline std::vector<double> axis_values(const GridAxis& axis) {
  if (axis.steps < 2) throw std::invalid_argument("GridAxis: steps must be >= 2");
  if (!(std::isfinite(axis.lo) && std::isfinite(axis.hi)) || axis.lo >= axis.hi)
    throw std::invalid_argument("GridAxis: bounds must be finite with lo < hi");
  std::vector<double> vals(axis.steps);
  if (axis.scale == GridAxis::Scale::log2) {
    if (!(axis.lo > 0)) throw std::invalid_argument("GridAxis: log2 bounds must be positive");
    const double e0 = std::log2(axis.lo), e1 = std::log2(axis.hi);
    for (std::size_t i = 0; i < axis.steps; ++i)
      vals[i] = std::exp2(e0 + (e1 - e0) * static_cast<double>(i) /
                                   static_cast<double>(axis.steps - 1));
  } else {
    for (std::size_t i = 0; i < axis.steps; ++i)
      vals[i] = axis.lo + (axis.hi - axis.lo) * static_cast<double>(i) /
                              static_cast<double>(axis.steps - 1);
  }
  // endpoints land exactly on the declared bounds
  vals.front() = axis.lo;
  vals.back() = axis.hi;
  return vals;
}

struct Evaluation {
  std::vector<double> params;
  double objective = 0;
};

struct TuneResult {
  std::vector<std::string> param_names;
  std::vector<double> best_params;
  double best_objective = -std::numeric_limits<double>::infinity();
  std::size_t evaluations = 0;
  double wall_seconds = 0;
  std::vector<Evaluation> trace;
};

using Objective = std::function<double(std::span<const double>)>;

/// Exhaustive Cartesian sweep in lexicographic axis order (last axis
/// fastest). Ties keep the earliest evaluation.
inline TuneResult grid_search(const Objective& objective, const GridSpec& grid) {
  if (grid.axes.empty()) throw std::invalid_argument("grid_search: no axes");
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<std::vector<double>> values;
  values.reserve(grid.axes.size());
  std::size_t total = 1;
  TuneResult res;
  for (const GridAxis& a : grid.axes) {
    values.push_back(axis_values(a));
    total *= a.steps;
    res.param_names.push_back(a.name);
  }
  res.trace.reserve(total);

  std::vector<std::size_t> idx(grid.axes.size(), 0);
  std::vector<double> point(grid.axes.size());
  for (std::size_t e = 0; e < total; ++e) {
    for (std::size_t d = 0; d < idx.size(); ++d) point[d] = values[d][idx[d]];
    const double obj = objective(point);
    res.trace.push_back({point, obj});
    if (obj > res.best_objective) {
      res.best_objective = obj;
      res.best_params = point;
    }
    for (std::size_t d = idx.size(); d-- > 0;) {
      if (++idx[d] < values[d].size()) break;
      idx[d] = 0;
    }
  }
  res.evaluations = total;
  if (res.best_params.empty()) res.best_params = res.trace.front().params;  // all -inf
  res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

/// Synchronous global-best particle swarm. Velocities are clamped to the
/// per-axis range, positions reflect at the bounds; deterministic given
/// the seed. Maximizes the objective.
struct PsoConfig {
  std::size_t swarm_size = 20;
  std::size_t iterations = 50;
  double inertia = 0.72;
  double cognitive = 1.49;
  double social = 1.49;
  std::vector<std::pair<double, double>> bounds;  // per-parameter (lo, hi)
  std::vector<std::string> param_names;           // optional, for reports
  std::uint64_t seed = 0;
};

inline TuneResult pso_optimize(const Objective& objective, const PsoConfig& cfg) {
  if (cfg.bounds.empty()) throw std::invalid_argument("pso_optimize: bounds required");
  if (cfg.swarm_size < 1 || cfg.iterations < 1)
    throw std::invalid_argument("pso_optimize: swarm_size and iterations must be >= 1");
  for (auto [lo, hi] : cfg.bounds)
    if (!(std::isfinite(lo) && std::isfinite(hi)) || lo >= hi)
      throw std::invalid_argument("pso_optimize: bounds must be finite with lo < hi");
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t dim = cfg.bounds.size();
  const double neg_inf = -std::numeric_limits<double>::infinity();

  TuneResult res;
  res.param_names = cfg.param_names;
  if (res.param_names.size() != dim) {
    res.param_names.resize(dim);
    for (std::size_t d = 0; d < dim; ++d)
      if (res.param_names[d].empty()) res.param_names[d] = "p" + std::to_string(d);
  }

  struct Particle {
    std::vector<double> x, v, best_x;
    double best = 0;
  };
  std::vector<Particle> swarm(cfg.swarm_size);
  std::vector<double> gbest_x;
  double gbest = neg_inf;

  Rng rng = Rng::stream(cfg.seed, 0x9507);
  for (std::size_t p = 0; p < cfg.swarm_size; ++p) {
    Particle& part = swarm[p];
    part.x.resize(dim);
    part.v.resize(dim);
    for (std::size_t d = 0; d < dim; ++d) {
      const auto [lo, hi] = cfg.bounds[d];
      part.x[d] = rng.next_uniform(lo, hi);
      part.v[d] = rng.next_uniform(-(hi - lo), hi - lo) * 0.1;
    }
    part.best = objective(part.x);
    part.best_x = part.x;
    res.trace.push_back({part.x, part.best});
    if (part.best > gbest) {
      gbest = part.best;
      gbest_x = part.x;
    }
  }
  if (gbest_x.empty()) gbest_x = swarm.front().x;  // every start returned -inf

  for (std::size_t it = 0; it < cfg.iterations; ++it) {
    for (Particle& part : swarm) {
      for (std::size_t d = 0; d < dim; ++d) {
        const auto [lo, hi] = cfg.bounds[d];
        const double range = hi - lo;
        const double r1 = rng.next_double(), r2 = rng.next_double();
        part.v[d] = cfg.inertia * part.v[d] +
                    cfg.cognitive * r1 * (part.best_x[d] - part.x[d]) +
                    cfg.social * r2 * (gbest_x[d] - part.x[d]);
        part.v[d] = std::clamp(part.v[d], -range, range);
        part.x[d] += part.v[d];
        if (part.x[d] > hi) {
          part.x[d] = hi - (part.x[d] - hi);
          part.v[d] = -part.v[d];
        }
        if (part.x[d] < lo) {
          part.x[d] = lo + (lo - part.x[d]);
          part.v[d] = -part.v[d];
        }
        part.x[d] = std::clamp(part.x[d], lo, hi);  // deep overshoots
      }
      const double obj = objective(part.x);
      res.trace.push_back({part.x, obj});
      if (obj > part.best) {
        part.best = obj;
        part.best_x = part.x;
      }
    }
    // Synchronous update: the global best moves once per iteration.
    for (const Particle& part : swarm)
      if (part.best > gbest) {
        gbest = part.best;
        gbest_x = part.best_x;
      }
  }

  res.best_objective = gbest;
  res.best_params = gbest_x;
  res.evaluations = res.trace.size();
  res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

/// F_pb of a freshly trained model on a validation split that carries
/// observed positive/background labels. Training failures score -inf so
/// searches continue over them.
inline double objective_fpb(
    const std::function<std::function<bool(std::span<const double>)>(const Dataset&)>& recipe,
    const Dataset& train_part, const Dataset& validation_part) {
  bool has_pos = false, has_bg = false;
  for (const Sample& s : validation_part.samples) {
    if (s.label.observed == Observed::positive) has_pos = true;
    if (s.label.observed == Observed::background) has_bg = true;
  }
  if (!has_pos || !has_bg)
    throw std::invalid_argument("objective_fpb: validation needs positives and background");
  try {
    const auto predictor = recipe(train_part);
    PbConfusion pb;
    for (const Sample& s : validation_part.samples) {
      const bool predicted = predictor(s.features);
      if (s.label.observed == Observed::positive) {
        predicted ? ++pb.tp_prime : ++pb.fn_prime;
      } else if (s.label.observed == Observed::background) {
        predicted ? ++pb.fp_prime : ++pb.background_negative;
      }
    }
    return f_pb(pb);
  } catch (const std::exception&) {
    return -std::numeric_limits<double>::infinity();
  }
}

}  // namespace occ
