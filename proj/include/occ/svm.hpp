#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "occ/data.hpp"
#include "occ/smo.hpp"
#include "occ/soft_model.hpp"

namespace occ {

enum class SvmVariant { csvc, bsvm, ocsvm };

inline const char* to_string(SvmVariant v) {
  switch (v) {
    case SvmVariant::csvc: return "csvc";
    case SvmVariant::bsvm: return "bsvm";
    case SvmVariant::ocsvm: return "ocsvm";
  }
  return "?";
}

/// Trained support-vector machine. For csvc/bsvm the coefficients are
/// y_i * alpha_i and the decision is sum coef_i k(sv_i, x) + offset; for
/// ocsvm they are alpha_i (summing to 1) and the decision is
/// sum coef_i k(sv_i, x) - offset.
struct SvmModel {
  SvmVariant variant = SvmVariant::csvc;
  RbfKernel kernel;
  std::vector<FeatureVector> support_vectors;
  std::vector<double> coefficients;
  double offset = 0.0;
  double c_plus = 0.0, c_minus = 0.0, nu = 0.0;  // whichever apply
  std::size_t iterations = 0;
  double kkt_violation = 0.0;
  double dual_objective = 0.0;
};

inline double decision_value(const SvmModel& m, std::span<const double> x) {
  if (!m.support_vectors.empty() && m.support_vectors.front().size() != x.size())
    throw std::invalid_argument("decision_value: feature dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < m.support_vectors.size(); ++i)
    s += m.coefficients[i] * m.kernel(m.support_vectors[i], x);
  return m.variant == SvmVariant::ocsvm ? s - m.offset : s + m.offset;
}

/// Sign of the decision value; an exact zero counts as +1.
inline int predict_label(const SvmModel& m, std::span<const double> x) {
  return decision_value(m, x) >= 0.0 ? +1 : -1;
}

namespace detail {

inline FeatureMatrix stack_features(const Dataset& a, const Dataset& b) {
  FeatureMatrix m;
  m.cols = a.empty() ? b.feature_count() : a.feature_count();
  m.rows = a.size() + b.size();
  m.a.reserve(m.rows * m.cols);
  for (const Dataset* d : {&a, &b})
    for (const Sample& s : d->samples) {
      if (s.features.size() != m.cols)
        throw std::invalid_argument("svm: inconsistent feature arity at sample " + s.id);
      m.a.insert(m.a.end(), s.features.begin(), s.features.end());
    }
  return m;
}

inline SvmModel from_solution(SvmVariant variant, const FeatureMatrix& x,
                              const std::vector<double>& y, const SmoResult& sol,
                              RbfKernel kernel) {
  SvmModel m;
  m.variant = variant;
  m.kernel = kernel;
  m.iterations = sol.iterations;
  m.kkt_violation = sol.kkt_violation;
  m.dual_objective = sol.dual_objective;
  for (std::size_t i = 0; i < sol.alpha.size(); ++i) {
    if (sol.alpha[i] <= 0.0) continue;
    m.support_vectors.emplace_back(x.row(i).begin(), x.row(i).end());
    m.coefficients.push_back(variant == SvmVariant::ocsvm ? sol.alpha[i]
                                                          : y[i] * sol.alpha[i]);
  }
  m.offset = variant == SvmVariant::ocsvm ? sol.rho : -sol.rho;
  return m;
}

inline std::size_t pass_budget(std::size_t n) { return std::max<std::size_t>(10000, 200 * n); }

}  // namespace detail

/// Soft-margin two-class SVM with a uniform penalty. The seed is accepted
/// for interface symmetry; training is deterministic regardless.
inline SvmModel train_csvc(const Dataset& pos, const Dataset& neg, double C, double gamma,
                           [[maybe_unused]] std::uint64_t seed = 0) {
  if (pos.empty() || neg.empty())
    throw std::invalid_argument("train_csvc: both classes must be non-empty");
  if (!(C > 0.0)) throw std::invalid_argument("train_csvc: C must be > 0");
  const FeatureMatrix x = detail::stack_features(pos, neg);
  GramCache gram(x, RbfKernel{gamma});
  SmoProblem prob;
  prob.gram = &gram;
  prob.y.assign(x.rows, -1.0);
  std::fill(prob.y.begin(), prob.y.begin() + static_cast<std::ptrdiff_t>(pos.size()), 1.0);
  prob.p.assign(x.rows, -1.0);
  prob.c.assign(x.rows, C);
  const SmoResult sol = smo_solve(prob, 1e-3, detail::pass_budget(x.rows));
  SvmModel m = detail::from_solution(SvmVariant::csvc, x, prob.y, sol, RbfKernel{gamma});
  m.c_plus = m.c_minus = C;
  return m;
}

/// Biased SVM: background rows are treated as negatives but carry their
/// own penalty C-, while positives carry C+.
inline SvmModel train_bsvm(const Dataset& pos, const Dataset& background, double c_plus,
                           double c_minus, double gamma) {
  if (pos.empty() || background.empty())
    throw std::invalid_argument("train_bsvm: both sets must be non-empty");
  if (!(c_plus > 0.0) || !(c_minus > 0.0))
    throw std::invalid_argument("train_bsvm: penalties must be > 0");
  const FeatureMatrix x = detail::stack_features(pos, background);
  GramCache gram(x, RbfKernel{gamma});
  SmoProblem prob;
  prob.gram = &gram;
  prob.y.assign(x.rows, -1.0);
  std::fill(prob.y.begin(), prob.y.begin() + static_cast<std::ptrdiff_t>(pos.size()), 1.0);
  prob.p.assign(x.rows, -1.0);
  prob.c.assign(x.rows, c_minus);
  std::fill(prob.c.begin(), prob.c.begin() + static_cast<std::ptrdiff_t>(pos.size()), c_plus);
  const SmoResult sol = smo_solve(prob, 1e-3, detail::pass_budget(x.rows));
  SvmModel m = detail::from_solution(SvmVariant::bsvm, x, prob.y, sol, RbfKernel{gamma});
  m.c_plus = c_plus;
  m.c_minus = c_minus;
  return m;
}

/// One-class SVM (nu formulation, coefficients scaled to sum to 1 with
/// box 1/(nu n)): nu upper-bounds the training-outlier fraction and
/// lower-bounds the support-vector fraction, each within 1/n.
inline SvmModel train_ocsvm(const Dataset& pos, double nu, double gamma) {
  if (pos.empty()) throw std::invalid_argument("train_ocsvm: empty positive set");
  if (!(nu > 0.0 && nu < 1.0)) throw std::invalid_argument("train_ocsvm: nu must be in (0,1)");
  const Dataset empty;
  const FeatureMatrix x = detail::stack_features(pos, empty);
  const std::size_t n = x.rows;
  GramCache gram(x, RbfKernel{gamma});
  SmoProblem prob;
  prob.gram = &gram;
  prob.y.assign(n, 1.0);
  prob.p.assign(n, 0.0);
  const double cap = 1.0 / (nu * static_cast<double>(n));
  prob.c.assign(n, cap);
  prob.delta = 1.0;
  prob.alpha0.assign(n, 0.0);
  double remaining = 1.0;
  for (std::size_t i = 0; i < n && remaining > 0.0; ++i) {
    prob.alpha0[i] = std::min(cap, remaining);
    remaining -= prob.alpha0[i];
  }
  const SmoResult sol = smo_solve(prob, 1e-3, detail::pass_budget(n));
  SvmModel m = detail::from_solution(SvmVariant::ocsvm, x, prob.y, sol, RbfKernel{gamma});
  m.nu = nu;
  return m;
}

inline nlohmann::json svm_to_json(const SvmModel& m) {
  nlohmann::json j;
  j["schema"] = 1;
  j["kind"] = "svm";
  j["variant"] = to_string(m.variant);
  j["gamma"] = m.kernel.gamma;
  j["support_vectors"] = m.support_vectors;
  j["coefficients"] = m.coefficients;
  j["offset"] = m.offset;
  j["c_plus"] = m.c_plus;
  j["c_minus"] = m.c_minus;
  j["nu"] = m.nu;
  return j;
}

inline SvmModel svm_from_json(const nlohmann::json& j) {
  SvmModel m;
  const std::string v = j.at("variant").get<std::string>();
  if (v == "csvc") m.variant = SvmVariant::csvc;
  else if (v == "bsvm") m.variant = SvmVariant::bsvm;
  else if (v == "ocsvm") m.variant = SvmVariant::ocsvm;
  else throw std::runtime_error("svm model file: unknown variant " + v);
  m.kernel.gamma = j.at("gamma").get<double>();
  m.support_vectors = j.at("support_vectors").get<std::vector<FeatureVector>>();
  m.coefficients = j.at("coefficients").get<std::vector<double>>();
  m.offset = j.at("offset").get<double>();
  m.c_plus = j.value("c_plus", 0.0);
  m.c_minus = j.value("c_minus", 0.0);
  m.nu = j.value("nu", 0.0);
  return m;
}

}  // namespace occ
