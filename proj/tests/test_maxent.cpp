#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "occ/maxent.hpp"
#include "occ/model_io.hpp"
#include "occ/synth.hpp"
#include "test_util.hpp"

using namespace occ;

TEST_CASE("expand_features blocks and ordering") {
  MaxentConfig cfg;
  cfg.quadratic = true;
  cfg.product = false;
  const FeatureVector z = expand_features(std::vector<double>{0.5, 1.0}, cfg);
  REQUIRE(z == FeatureVector{0.5, 1.0, 0.25, 1.0});

  SECTION("linear only is the identity") {
    MaxentConfig lin;
    lin.quadratic = false;
    CHECK(expand_features(std::vector<double>{0.3, 0.7}, lin) == FeatureVector{0.3, 0.7});
  }

  SECTION("all three blocks at K=24 give dimension 324") {
    MaxentConfig all;
    all.quadratic = true;
    all.product = true;
    CHECK(expanded_dim(24, all) == 324);  // 24 + 24 + 276
    std::vector<double> x(24, 0.5);
    CHECK(expand_features(x, all).size() == 324);
  }

  SECTION("product block is lexicographic in (i, j)") {
    MaxentConfig pr;
    pr.quadratic = false;
    pr.product = true;
    const FeatureVector e = expand_features(std::vector<double>{2.0, 3.0, 5.0}, pr);
    REQUIRE(e == FeatureVector{2, 3, 5, 6, 10, 15});  // x0x1, x0x2, x1x2
  }

  SECTION("disabling linear is rejected") {
    MaxentConfig bad;
    bad.linear = false;
    CHECK_THROWS_AS(expand_features(std::vector<double>{0.1}, bad), std::invalid_argument);
  }
}

namespace {

std::pair<Dataset, Dataset> separated_1d(std::size_t n, std::uint64_t seed) {
  Dataset pos, bg;
  pos.feature_names = bg.feature_names = {"x"};
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    pos.samples.push_back(testutil::make_sample(
        "p" + std::to_string(i), {0.8 + 0.05 * rng.next_normal()}, Observed::positive));
    bg.samples.push_back(testutil::make_sample(
        "b" + std::to_string(i), {0.2 + 0.05 * rng.next_normal()}, Observed::background));
  }
  return {pos, bg};
}

}  // namespace

TEST_CASE("train_maxent separates presence from far background") {
  auto [pos, bg] = separated_1d(200, 4);
  MaxentConfig cfg;
  const TrainedSoftModel m = train_maxent(pos, bg, cfg);
  CHECK(m.predict_score(std::vector<double>{0.8}) >= 0.9);
  CHECK(m.predict_score(std::vector<double>{0.2}) <= 0.1);
  CHECK(m.summary.converged);

  SECTION("determinism") {
    const TrainedSoftModel again = train_maxent(pos, bg, cfg);
    const auto& wa = dynamic_cast<const MaxentModel&>(*m.model).weights();
    const auto& wb = dynamic_cast<const MaxentModel&>(*again.model).weights();
    REQUIRE(wa == wb);
  }

  SECTION("round-trip through JSON reproduces scores exactly") {
    const TrainedSoftModel back =
        soft_model_from_json(nlohmann::json::parse(m.to_json().dump()));
    for (double x = 0.0; x <= 1.0; x += 0.05)
      REQUIRE(back.predict_score(std::vector<double>{x}) ==
              m.predict_score(std::vector<double>{x}));
  }
}

TEST_CASE("huge l1 penalty zeroes the expanded weights") {
  auto [pos, bg] = separated_1d(100, 5);
  MaxentConfig cfg;
  cfg.l1_penalty = 1e3;
  const TrainedSoftModel m = train_maxent(pos, bg, cfg);
  const auto& mm = dynamic_cast<const MaxentModel&>(*m.model);
  CHECK(mm.nonzero_weights() == 0);
  // score collapses to the constant sigmoid(intercept)
  const double a = m.predict_score(std::vector<double>{0.1});
  const double b = m.predict_score(std::vector<double>{0.9});
  CHECK(a == Catch::Approx(b).margin(1e-12));
}

TEST_CASE("l1 path: heavier regularization never adds nonzero weights") {
  const Scene scene = generate_scene(testutil::mini_scene_spec(1200, 1.2), 41);
  const Dataset scarred = scar_label(scene.dataset, 0.6, 2);
  const LabelPartition parts = partition_by_label(scarred);
  std::size_t prev = std::numeric_limits<std::size_t>::max();
  for (double l1 : {1e-4, 1e-3, 1e-2, 1e-1}) {
    MaxentConfig cfg;
    cfg.l1_penalty = l1;
    cfg.max_iterations = 3000;
    const TrainedSoftModel m = train_maxent(parts.positives, parts.background, cfg);
    const std::size_t nnz = dynamic_cast<const MaxentModel&>(*m.model).nonzero_weights();
    CHECK(nnz <= prev);
    prev = nnz;
  }
}

TEST_CASE("regularized objective is non-increasing across iterations") {
  // the fit is deterministic, so prefix runs expose the per-iteration
  // objective trajectory
  const Scene scene = generate_scene(testutil::mini_scene_spec(600, 1.0), 42);
  const Dataset scarred = scar_label(scene.dataset, 0.5, 3);
  const LabelPartition parts = partition_by_label(scarred);
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t iters : {1u, 2u, 3u, 5u, 8u, 13u, 21u, 34u}) {
    MaxentConfig cfg;
    cfg.max_iterations = iters;
    cfg.tolerance = 0.0;  // never stop early
    const TrainedSoftModel m = train_maxent(parts.positives, parts.background, cfg);
    CHECK(m.summary.final_loss <= prev + 1e-12);
    prev = m.summary.final_loss;
  }
}

TEST_CASE("maxent_classify shares the >= threshold tie rule") {
  auto [pos, bg] = separated_1d(50, 6);
  const TrainedSoftModel m = train_maxent(pos, bg, MaxentConfig{});
  // constant model at exactly 0.5: intercept-only
  const TrainedSoftModel flat{
      std::make_shared<MaxentModel>(MaxentConfig{}, 1, std::vector<double>{0.0, 0.0}, 0.0),
      {}};
  CHECK(maxent_classify(flat, std::vector<double>{0.4}));   // 0.5 -> presence
  CHECK(maxent_classify(m, std::vector<double>{0.9}));
  CHECK_FALSE(maxent_classify(m, std::vector<double>{0.05}));
}

TEST_CASE("train_maxent input validation") {
  Dataset empty;
  empty.feature_names = {"x"};
  auto [pos, bg] = separated_1d(10, 7);
  CHECK_THROWS_AS(train_maxent(empty, bg, MaxentConfig{}), std::invalid_argument);
  CHECK_THROWS_AS(train_maxent(pos, empty, MaxentConfig{}), std::invalid_argument);
}
