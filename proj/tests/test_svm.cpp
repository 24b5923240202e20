#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "occ/sampling.hpp"
#include "occ/svm.hpp"
#include "occ/synth.hpp"
#include "qp_reference.hpp"
#include "test_util.hpp"

using namespace occ;

namespace {

Dataset points(std::initializer_list<std::vector<double>> xs, Observed label) {
  Dataset d;
  int i = 0;
  for (const auto& x : xs) {
    if (d.feature_names.empty())
      for (std::size_t j = 0; j < x.size(); ++j)
        d.feature_names.push_back("f" + std::to_string(j + 1));
    d.samples.push_back(
        testutil::make_sample((label == Observed::positive ? "p" : "n") + std::to_string(i++),
                              x, label));
  }
  return d;
}

SmoProblem random_problem(const FeatureMatrix& x, GramCache& gram, Rng& rng) {
  const std::size_t n = x.rows;
  SmoProblem prob;
  prob.gram = &gram;
  prob.p.assign(n, -1.0);
  prob.y.resize(n);
  prob.c.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    prob.y[i] = rng.next_below(2) ? 1.0 : -1.0;
    prob.c[i] = rng.next_uniform(0.5, 8.0);
  }
  return prob;
}

}  // namespace

TEST_CASE("smo on a symmetric 2-point problem puts the boundary at zero") {
  const Dataset pos = points({{1.0}}, Observed::positive);
  const Dataset neg = points({{-1.0}}, Observed::negative);
  const SvmModel m = train_csvc(pos, neg, 1000.0, 0.5);
  REQUIRE(m.support_vectors.size() == 2);  // both points support the margin
  CHECK(std::abs(decision_value(m, std::vector<double>{0.0})) <= 1e-6);
  CHECK(decision_value(m, std::vector<double>{1.0}) > 0);
  CHECK(decision_value(m, std::vector<double>{-1.0}) < 0);
  CHECK(predict_label(m, std::vector<double>{0.0}) == +1);  // tie rule
}

TEST_CASE("smo dual objective matches the dense reference on random tiny problems") {
  Rng rng(1234);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t n = 4 + rng.next_below(9);  // 4..12 points
    FeatureMatrix x;
    x.rows = n;
    x.cols = 2;
    for (std::size_t i = 0; i < 2 * n; ++i) x.a.push_back(rng.next_uniform(-2, 2));
    GramCache gram(x, RbfKernel{0.7});
    SmoProblem prob = random_problem(x, gram, rng);
    // ensure both label signs occur so the equality constraint bites
    prob.y[0] = 1.0;
    prob.y[1] = -1.0;

    const SmoResult sol = smo_solve(prob, 1e-5, 200000);
    const qpref::Reference ref = qpref::solve(prob);
    INFO("rep " << rep << " n " << n << " smo " << sol.dual_objective << " ref "
                << ref.objective);
    const double denom = std::max(1.0, std::abs(ref.objective));
    REQUIRE(std::abs(sol.dual_objective - ref.objective) / denom <= 1e-4);
    REQUIRE(kkt_violation(prob, sol.alpha) <= 1e-5);
  }
}

TEST_CASE("smo handles duplicate points with conflicting labels") {
  FeatureMatrix x;
  x.rows = 4;
  x.cols = 1;
  x.a = {0.5, 0.5, 0.5, -1.0};
  GramCache gram(x, RbfKernel{1.0});
  SmoProblem prob;
  prob.gram = &gram;
  prob.y = {1.0, -1.0, 1.0, -1.0};
  prob.p.assign(4, -1.0);
  prob.c.assign(4, 3.0);
  const SmoResult sol = smo_solve(prob, 1e-4, 100000);
  CHECK(sol.converged);
  for (double a : sol.alpha) {
    CHECK(a >= 0.0);
    CHECK(a <= 3.0);
  }
}

TEST_CASE("smo rejects malformed problems") {
  FeatureMatrix x;
  x.rows = 2;
  x.cols = 1;
  x.a = {0.0, 1.0};
  GramCache gram(x, RbfKernel{1.0});
  SmoProblem prob;
  prob.gram = &gram;
  prob.y = {1.0, -1.0};
  prob.p.assign(2, -1.0);
  prob.c = {1.0, 0.0};  // non-positive penalty
  CHECK_THROWS_AS(smo_solve(prob), std::invalid_argument);
  prob.c = {1.0, 1.0};
  prob.alpha0 = {1.0, 0.0};  // infeasible start
  CHECK_THROWS_AS(smo_solve(prob), std::invalid_argument);
}

TEST_CASE("smo convergence error carries best-so-far diagnostics") {
  auto [d, targets] = testutil::two_blobs(20, 2, 0.3, 7);
  FeatureMatrix x;
  x.rows = d.size();
  x.cols = 2;
  for (const Sample& s : d.samples) x.a.insert(x.a.end(), s.features.begin(), s.features.end());
  GramCache gram(x, RbfKernel{1.0});
  SmoProblem prob;
  prob.gram = &gram;
  prob.p.assign(d.size(), -1.0);
  prob.c.assign(d.size(), 100.0);
  prob.y.resize(d.size());
  for (std::size_t i = 0; i < d.size(); ++i)
    prob.y[i] = targets[i] ? 1.0 : -1.0;
  try {
    smo_solve(prob, 1e-9, 3);  // absurd pass budget forces the error path
    FAIL("expected SmoConvergenceError");
  } catch (const SmoConvergenceError& e) {
    CHECK(e.best_so_far.iterations == 3);
    CHECK(e.best_so_far.kkt_violation > 0);
    CHECK(e.best_so_far.alpha.size() == d.size());
  }
}

TEST_CASE("train_csvc separates generated clusters") {
  auto [d, targets] = testutil::two_blobs(60, 2, 2.0, 51);
  const LabelPartition parts = partition_by_label(d);
  const SvmModel m = train_csvc(parts.positives, parts.negatives, 10.0, 1.0);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < d.size(); ++i)
    correct += (predict_label(m, d.samples[i].features) > 0) == (targets[i] == 1);
  CHECK(static_cast<double>(correct) / static_cast<double>(d.size()) >= 0.99);

  SECTION("equality constraint: coefficients sum to zero") {
    double sum = 0;
    for (double c : m.coefficients) sum += c;
    CHECK(std::abs(sum) <= 1e-8);
  }

  SECTION("coefficients bounded by the penalty") {
    for (double c : m.coefficients) CHECK(std::abs(c) <= 10.0 + 1e-12);
  }

  SECTION("determinism") {
    const SvmModel again = train_csvc(parts.positives, parts.negatives, 10.0, 1.0);
    REQUIRE(again.coefficients == m.coefficients);
    REQUIRE(again.offset == m.offset);
  }

  SECTION("batch prediction equals per-sample predictions") {
    for (const Sample& s : d.samples) {
      const double v = decision_value(m, s.features);
      REQUIRE(predict_label(m, s.features) == (v >= 0 ? 1 : -1));
    }
  }
}

TEST_CASE("tiny C keeps every coefficient at the (tiny) bound without blowing up") {
  auto [d, targets] = testutil::two_blobs(20, 2, 1.0, 3);
  const LabelPartition parts = partition_by_label(d);
  const SvmModel m = train_csvc(parts.positives, parts.negatives, 1e-6, 1.0);
  for (double c : m.coefficients) CHECK(std::abs(c) <= 1e-6 + 1e-18);
}

TEST_CASE("train_bsvm with equal penalties reduces to train_csvc") {
  Rng rng(77);
  for (int rep = 0; rep < 5; ++rep) {
    auto [d, targets] = testutil::two_blobs(25 + 5 * rep, 3, 1.4, 100 + rep);
    const LabelPartition parts = partition_by_label(d);
    // same rows fed once as negatives, once as background
    Dataset background = parts.negatives;
    for (Sample& s : background.samples) s.label.observed = Observed::background;
    const double C = 2.0 + rep;
    const SvmModel csvc = train_csvc(parts.positives, parts.negatives, C, 0.8);
    const SvmModel bsvm = train_bsvm(parts.positives, background, C, C, 0.8);
    REQUIRE(bsvm.support_vectors.size() == csvc.support_vectors.size());
    for (std::size_t i = 0; i < csvc.coefficients.size(); ++i)
      REQUIRE(bsvm.coefficients[i] == Catch::Approx(csvc.coefficients[i]).margin(1e-6));
    REQUIRE(bsvm.offset == Catch::Approx(csvc.offset).margin(1e-6));
  }
}

TEST_CASE("raising C+ never hurts recall on held-out presences") {
  const Scene scene = generate_scene(testutil::mini_scene_spec(3000, 1.2), 19);
  SamplingPlan plan;
  plan.n_positive = 150;
  plan.n_background = 900;
  plan.n_negative = 0;
  plan.seed = 23;
  const TrainingDraw draw = draw_training_sets(scene.dataset, plan, 0);

  auto recall_of = [&](const SvmModel& m) {
    std::size_t tp = 0, fn = 0;
    for (const Sample& s : scene.dataset.samples) {
      if (s.label.truth != Truth::presence) continue;
      (predict_label(m, s.features) > 0 ? tp : fn) += 1;
    }
    return static_cast<double>(tp) / static_cast<double>(tp + fn);
  };
  const SvmModel balanced = train_bsvm(draw.positives, draw.background, 1.0, 1.0, 1.0);
  const SvmModel biased = train_bsvm(draw.positives, draw.background, 50.0, 1.0, 1.0);
  CHECK(recall_of(biased) >= recall_of(balanced));

  SECTION("empty positive set is a parameter error") {
    Dataset empty;
    empty.feature_names = scene.dataset.feature_names;
    CHECK_THROWS_AS(train_bsvm(empty, draw.background, 1.0, 1.0, 1.0),
                    std::invalid_argument);
  }
}

TEST_CASE("ocsvm nu-property on a tight cluster") {
  Rng rng(5);
  Dataset pos;
  pos.feature_names = {"a", "b"};
  for (int i = 0; i < 100; ++i)
    pos.samples.push_back(testutil::make_sample(
        std::to_string(i), {rng.next_normal() * 0.3, rng.next_normal() * 0.3},
        Observed::positive));
  const double nu = 0.1;
  const SvmModel m = train_ocsvm(pos, nu, 1.0);
  std::size_t outliers = 0;
  for (const Sample& s : pos.samples) outliers += decision_value(m, s.features) < 0;
  const double n = static_cast<double>(pos.size());
  CHECK(static_cast<double>(outliers) <= nu * n + 1.0);  // at most 10 + slack
  CHECK(static_cast<double>(m.support_vectors.size()) >= nu * n - 1.0);

  SECTION("simplex constraint and box") {
    double sum = 0;
    for (double a : m.coefficients) {
      CHECK(a >= 0.0);
      CHECK(a <= 1.0 / (nu * n) + 1e-12);
      sum += a;
    }
    CHECK(std::abs(sum - 1.0) <= 1e-8);
  }
}

TEST_CASE("nu near 1 makes nearly every point a support vector") {
  Rng rng(6);
  Dataset pos;
  pos.feature_names = {"a"};
  for (int i = 0; i < 60; ++i)
    pos.samples.push_back(
        testutil::make_sample(std::to_string(i), {rng.next_normal()}, Observed::positive));
  const SvmModel m = train_ocsvm(pos, 0.95, 0.7);
  CHECK(m.support_vectors.size() >= 57);  // >= nu*n - 1
}

TEST_CASE("ocsvm dual objective matches the dense reference") {
  Rng rng(31);
  FeatureMatrix x;
  x.rows = 10;
  x.cols = 2;
  for (std::size_t i = 0; i < 20; ++i) x.a.push_back(rng.next_uniform(-1, 1));
  GramCache gram(x, RbfKernel{1.3});
  const double nu = 0.4;
  SmoProblem prob;
  prob.gram = &gram;
  prob.y.assign(10, 1.0);
  prob.p.assign(10, 0.0);
  prob.c.assign(10, 1.0 / (nu * 10));
  prob.delta = 1.0;
  prob.alpha0.assign(10, 0.0);
  double rem = 1.0;
  for (std::size_t i = 0; i < 10 && rem > 0; ++i) {
    prob.alpha0[i] = std::min(1.0 / (nu * 10), rem);
    rem -= prob.alpha0[i];
  }
  const SmoResult sol = smo_solve(prob, 1e-6, 100000);
  const qpref::Reference ref = qpref::solve(prob);
  const double denom = std::max(1.0, std::abs(ref.objective));
  CHECK(std::abs(sol.dual_objective - ref.objective) / denom <= 1e-4);
}

TEST_CASE("single-point ocsvm accepts its own support vector") {
  Dataset pos = points({{0.3, 0.8}}, Observed::positive);
  const SvmModel m = train_ocsvm(pos, 0.5, 1.0);
  CHECK(decision_value(m, std::vector<double>{0.3, 0.8}) >= 0.0);
}

TEST_CASE("svm model round-trips through JSON exactly") {
  auto [d, targets] = testutil::two_blobs(20, 2, 1.5, 8);
  const LabelPartition parts = partition_by_label(d);
  const SvmModel m = train_csvc(parts.positives, parts.negatives, 5.0, 1.2);
  const SvmModel back = svm_from_json(nlohmann::json::parse(svm_to_json(m).dump()));
  REQUIRE(back.coefficients == m.coefficients);
  REQUIRE(back.offset == m.offset);
  REQUIRE(back.support_vectors == m.support_vectors);
  for (const Sample& s : d.samples)
    REQUIRE(decision_value(back, s.features) == decision_value(m, s.features));
}

TEST_CASE("kernel bounds hold on random vectors") {
  Rng rng(64);
  RbfKernel k{2.0};
  for (int i = 0; i < 200; ++i) {
    std::vector<double> a(4), b(4);
    for (auto& v : a) v = rng.next_uniform(-3, 3);
    for (auto& v : b) v = rng.next_uniform(-3, 3);
    const double kab = k(a, b);
    REQUIRE(kab > 0.0);
    REQUIRE(kab <= 1.0);
    REQUIRE(k(a, a) == 1.0);
  }
}
