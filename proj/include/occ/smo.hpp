#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "occ/kernel.hpp"

namespace occ {

/// Dual QP in the form shared by C-SVC, biased SVM and one-class SVM:
///   minimize 0.5 a'Qa + p'a   with Q_ij = y_i y_j K_ij
///   subject to y'a = delta, 0 <= a_i <= c_i.
struct SmoProblem {
  const GramCache* gram = nullptr;
  std::vector<double> y;          // +1 / -1
  std::vector<double> p;          // linear term
  std::vector<double> c;          // per-sample box
  double delta = 0.0;             // equality constraint value
  std::vector<double> alpha0;     // feasible start (empty means zeros)
};

struct SmoResult {
  std::vector<double> alpha;
  double rho = 0.0;           // decision offset: f(x) = sum y_i a_i k(x_i, x) - rho
  std::size_t iterations = 0;
  double kkt_violation = 0.0;  // final maximal-pair optimality gap
  double dual_objective = 0.0;
  bool converged = false;
};

class SmoConvergenceError : public std::runtime_error {
 public:
  SmoConvergenceError(std::string what, SmoResult best)
      : std::runtime_error(std::move(what)), best_so_far(std::move(best)) {}
  SmoResult best_so_far;
};

/// Sequential minimal optimization with maximal-violating-pair selection.
/// Convergence means no pair violates the KKT conditions by more than
/// `tol`. One pass = one pair update; trainers size `max_passes` with the
/// problem, the bare default suits small instances.
inline SmoResult smo_solve(const SmoProblem& prob, double tol = 1e-3,
                           std::size_t max_passes = 10000) {
  const std::size_t n = prob.y.size();
  if (prob.gram == nullptr || prob.gram->size() != n || prob.p.size() != n ||
      prob.c.size() != n)
    throw std::invalid_argument("smo_solve: inconsistent problem sizes");
  for (double ci : prob.c)
    if (!(ci > 0.0)) throw std::invalid_argument("smo_solve: penalties must be > 0");

  const GramCache& k = *prob.gram;
  const auto& y = prob.y;
  auto q = [&](std::size_t i, std::size_t j) { return y[i] * y[j] * k.at(i, j); };

  std::vector<double> alpha = prob.alpha0.empty() ? std::vector<double>(n, 0.0) : prob.alpha0;
  if (alpha.size() != n) throw std::invalid_argument("smo_solve: bad initial point");
  double ydot = 0.0;
  for (std::size_t t = 0; t < n; ++t) ydot += prob.y[t] * alpha[t];
  if (std::abs(ydot - prob.delta) > 1e-9)
    throw std::invalid_argument("smo_solve: initial point violates the equality constraint");

  // G_t = p_t + sum_s Q_ts a_s
  std::vector<double> grad = prob.p;
  for (std::size_t s = 0; s < n; ++s) {
    if (alpha[s] == 0.0) continue;
    for (std::size_t t = 0; t < n; ++t) grad[t] += q(t, s) * alpha[s];
  }

  constexpr double tau = 1e-12;
  const double inf = std::numeric_limits<double>::infinity();

  auto select_pair = [&](std::size_t& i, std::size_t& j) {
    double up_best = -inf, low_best = inf;
    i = n;
    j = n;
    for (std::size_t t = 0; t < n; ++t) {
      const double v = -y[t] * grad[t];
      const bool in_up = (y[t] > 0 && alpha[t] < prob.c[t]) || (y[t] < 0 && alpha[t] > 0);
      const bool in_low = (y[t] > 0 && alpha[t] > 0) || (y[t] < 0 && alpha[t] < prob.c[t]);
      if (in_up && v > up_best) {
        up_best = v;
        i = t;
      }
      if (in_low && v < low_best) {
        low_best = v;
        j = t;
      }
    }
    return (i < n && j < n) ? up_best - low_best : -inf;
  };

  std::size_t iter = 0;
  double violation = 0.0;
  for (;; ++iter) {
    std::size_t i, j;
    violation = select_pair(i, j);
    if (violation <= tol) break;
    if (iter >= max_passes) {
      SmoResult best;
      best.alpha = alpha;
      best.iterations = iter;
      best.kkt_violation = violation;
      best.converged = false;
      double obj = 0.0;
      for (std::size_t t = 0; t < n; ++t) obj += alpha[t] * (grad[t] + prob.p[t]);
      best.dual_objective = 0.5 * obj;
      throw SmoConvergenceError(
          "smo_solve: no convergence after " + std::to_string(iter) +
              " passes (violation " + std::to_string(violation) + ")",
          std::move(best));
    }

    const double old_i = alpha[i], old_j = alpha[j];
    if (y[i] != y[j]) {
      double quad = k.at(i, i) + k.at(j, j) + 2.0 * k.at(i, j) * y[i] * y[j];
      if (quad <= 0) quad = tau;
      const double d = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += d;
      alpha[j] += d;
      if (diff > 0) {
        if (alpha[j] < 0) {
          alpha[j] = 0;
          alpha[i] = diff;
        }
      } else {
        if (alpha[i] < 0) {
          alpha[i] = 0;
          alpha[j] = -diff;
        }
      }
      if (diff > prob.c[i] - prob.c[j]) {
        if (alpha[i] > prob.c[i]) {
          alpha[i] = prob.c[i];
          alpha[j] = prob.c[i] - diff;
        }
      } else {
        if (alpha[j] > prob.c[j]) {
          alpha[j] = prob.c[j];
          alpha[i] = prob.c[j] + diff;
        }
      }
    } else {
      double quad = k.at(i, i) + k.at(j, j) - 2.0 * k.at(i, j) * y[i] * y[j];
      if (quad <= 0) quad = tau;
      const double d = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= d;
      alpha[j] += d;
      if (sum > prob.c[i]) {
        if (alpha[i] > prob.c[i]) {
          alpha[i] = prob.c[i];
          alpha[j] = sum - prob.c[i];
        }
      } else {
        if (alpha[j] < 0) {
          alpha[j] = 0;
          alpha[i] = sum;
        }
      }
      if (sum > prob.c[j]) {
        if (alpha[j] > prob.c[j]) {
          alpha[j] = prob.c[j];
          alpha[i] = sum - prob.c[j];
        }
      } else {
        if (alpha[i] < 0) {
          alpha[i] = 0;
          alpha[j] = sum;
        }
      }
    }

    const double di = alpha[i] - old_i, dj = alpha[j] - old_j;
    if (di == 0.0 && dj == 0.0) {
      // Degenerate pair (identical rows at bounds): nothing can improve.
      break;
    }
    for (std::size_t t = 0; t < n; ++t) grad[t] += q(t, i) * di + q(t, j) * dj;
  }

  SmoResult res;
  res.iterations = iter;
  res.kkt_violation = std::max(violation, 0.0);
  res.converged = violation <= tol;

  // Offset from the KKT conditions: average y*G over free points, else the
  // midpoint of the feasible interval from the bounded points.
  double ub = inf, lb = -inf, sum_free = 0.0;
  std::size_t n_free = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = y[t] * grad[t];
    if (alpha[t] >= prob.c[t]) {
      if (y[t] < 0)
        ub = std::min(ub, yg);
      else
        lb = std::max(lb, yg);
    } else if (alpha[t] <= 0.0) {
      if (y[t] > 0)
        ub = std::min(ub, yg);
      else
        lb = std::max(lb, yg);
    } else {
      ++n_free;
      sum_free += yg;
    }
  }
  res.rho = n_free > 0 ? sum_free / static_cast<double>(n_free) : (ub + lb) / 2.0;

  double obj = 0.0;
  for (std::size_t t = 0; t < n; ++t) obj += alpha[t] * (grad[t] + prob.p[t]);
  res.dual_objective = 0.5 * obj;
  res.alpha = std::move(alpha);
  return res;
}

/// Recomputes the maximal-violating-pair gap for a solution; tests use it
/// to scan KKT residuals independent of the solver's own bookkeeping.
inline double kkt_violation(const SmoProblem& prob, const std::vector<double>& alpha) {
  const std::size_t n = prob.y.size();
  const GramCache& k = *prob.gram;
  const auto& y = prob.y;
  std::vector<double> grad = prob.p;
  for (std::size_t s = 0; s < n; ++s) {
    if (alpha[s] == 0.0) continue;
    for (std::size_t t = 0; t < n; ++t) grad[t] += y[t] * y[s] * k.at(t, s) * alpha[s];
  }
  const double inf = std::numeric_limits<double>::infinity();
  double up_best = -inf, low_best = inf;
  for (std::size_t t = 0; t < n; ++t) {
    const double v = -y[t] * grad[t];
    if ((y[t] > 0 && alpha[t] < prob.c[t]) || (y[t] < 0 && alpha[t] > 0))
      up_best = std::max(up_best, v);
    if ((y[t] > 0 && alpha[t] > 0) || (y[t] < 0 && alpha[t] < prob.c[t]))
      low_best = std::min(low_best, v);
  }
  if (up_best == -inf || low_best == inf) return 0.0;
  return std::max(0.0, up_best - low_best);
}

}  // namespace occ
