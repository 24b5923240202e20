#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "occ/synth.hpp"
#include "test_util.hpp"

using namespace occ;

namespace {

/// 1-D two-Gaussian spec: presence N(mu_p, 1), absence N(mu_a, 1).
SceneSpec one_d_spec(double mu_p, double mu_a, double prevalence) {
  SceneSpec spec;
  spec.n_objects = 100;
  spec.n_features = 1;
  spec.prevalence = prevalence;
  spec.presence_components = {{{mu_p}, {1.0}, 1.0}};
  spec.absence_components = {{{mu_a}, {1.0}, 1.0}};
  return spec;
}

}  // namespace

TEST_CASE("generate_scene produces the exact presence count") {
  SceneSpec spec = testutil::mini_scene_spec(10);
  spec.prevalence = 0.5;
  const Scene s = generate_scene(spec, 1);
  std::size_t presences = 0;
  for (const Sample& x : s.dataset.samples) presences += x.label.truth == Truth::presence;
  CHECK(presences == 5);
  CHECK(validate_dataset(s.dataset).empty());
}

TEST_CASE("default-scale scene lands at the expected prevalence counts") {
  SceneSpec spec = testutil::mini_scene_spec(43256);
  spec.prevalence = 0.175;
  const Scene s = generate_scene(spec, 2);
  std::size_t presences = 0;
  for (const Sample& x : s.dataset.samples) presences += x.label.truth == Truth::presence;
  CHECK(presences == 7570);  // round(0.175 * 43256)
}

TEST_CASE("two seeds differ in features but share label counts") {
  const SceneSpec spec = testutil::mini_scene_spec(300);
  const Scene a = generate_scene(spec, 1), b = generate_scene(spec, 2);
  std::size_t pa = 0, pb = 0;
  bool any_diff = false;
  for (std::size_t i = 0; i < a.dataset.size(); ++i) {
    pa += a.dataset.samples[i].label.truth == Truth::presence;
    pb += b.dataset.samples[i].label.truth == Truth::presence;
    any_diff = any_diff || a.dataset.samples[i].features != b.dataset.samples[i].features;
  }
  CHECK(pa == pb);
  CHECK(any_diff);

  const Scene a2 = generate_scene(spec, 1);
  for (std::size_t i = 0; i < a.dataset.size(); ++i)
    REQUIRE(a2.dataset.samples[i].features == a.dataset.samples[i].features);
}

TEST_CASE("generate_scene rejects degenerate specs") {
  SceneSpec spec = testutil::mini_scene_spec(100);
  spec.presence_components[0].variance[0] = 0.0;
  CHECK_THROWS_AS(generate_scene(spec, 1), std::invalid_argument);
  SceneSpec bad_w = testutil::mini_scene_spec(100);
  bad_w.absence_components[0].weight = 0.9;
  CHECK_THROWS_AS(generate_scene(bad_w, 1), std::invalid_argument);
}

TEST_CASE("analytic_posterior closed forms") {
  SECTION("symmetric equidistant point scores 0.5") {
    const SceneSpec s = one_d_spec(1.0, -1.0, 0.5);
    CHECK(analytic_posterior(s, {0.0}) == Catch::Approx(0.5).margin(1e-12));
  }
  SECTION("presence mean of far-separated classes scores >= 0.99") {
    const SceneSpec s = one_d_spec(10.0, -10.0, 0.5);
    CHECK(analytic_posterior(s, {10.0}) >= 0.99);
  }
  SECTION("N(0,1) presence vs N(2,1) absence: logistic of 2 - 2x") {
    const SceneSpec s = one_d_spec(0.0, 2.0, 0.5);
    CHECK(analytic_posterior(s, {1.0}) == Catch::Approx(0.5).margin(1e-12));
    // independent closed form: 1 / (1 + exp(-2))
    CHECK(analytic_posterior(s, {0.0}) ==
          Catch::Approx(0.8807970779778823).margin(1e-12));
  }
  SECTION("far-out points do not produce NaN") {
    const SceneSpec s = one_d_spec(0.0, 2.0, 0.5);
    const double p = analytic_posterior(s, {1e4});
    CHECK(std::isfinite(p));
    CHECK(p <= 1.0);
  }
}

TEST_CASE("posterior averaged over a scene matches prevalence within 3 sigma") {
  const SceneSpec spec = testutil::mini_scene_spec(4000);
  const Scene s = generate_scene(spec, 33);
  double sum = 0, sumsq = 0;
  for (const Sample& x : s.dataset.samples) {
    const double p = analytic_posterior_normalized(s, x.features);
    sum += p;
    sumsq += p * p;
  }
  const double n = static_cast<double>(s.dataset.size());
  const double mean = sum / n;
  const double var = sumsq / n - mean * mean;
  const double sigma = std::sqrt(var / n);
  CHECK(std::abs(mean - spec.prevalence) <= 3 * sigma + 1.0 / n);
}

TEST_CASE("scar_label observation process") {
  const Scene s = generate_scene(testutil::mini_scene_spec(10000), 4);

  SECTION("c = 1 observes every presence") {
    const Dataset d = scar_label(s.dataset, 1.0, 9);
    for (const Sample& x : d.samples) {
      if (x.label.truth == Truth::presence)
        CHECK(x.label.observed == Observed::positive);
      else
        CHECK(x.label.observed == Observed::background);
    }
  }

  SECTION("c = 0.4 hits the binomial 3-sigma band and never marks absences") {
    const Dataset d = scar_label(s.dataset, 0.4, 9);
    std::size_t presences = 0, observed = 0;
    for (const Sample& x : d.samples) {
      if (x.label.truth == Truth::absence)
        REQUIRE(x.label.observed != Observed::positive);
      if (x.label.truth == Truth::presence) {
        ++presences;
        observed += x.label.observed == Observed::positive;
      }
    }
    const double expectation = 0.4 * static_cast<double>(presences);
    const double sigma = std::sqrt(0.4 * 0.6 * static_cast<double>(presences));
    CHECK(std::abs(static_cast<double>(observed) - expectation) <= 3 * sigma);
    // law of large numbers: empirical rate near c
    CHECK(std::abs(static_cast<double>(observed) / static_cast<double>(presences) - 0.4) <=
          0.02);
  }

  SECTION("same seed twice labels identically") {
    const Dataset a = scar_label(s.dataset, 0.3, 5), b = scar_label(s.dataset, 0.3, 5);
    for (std::size_t i = 0; i < a.size(); ++i)
      REQUIRE(a.samples[i].label.observed == b.samples[i].label.observed);
  }

  SECTION("c outside (0,1] is rejected") {
    CHECK_THROWS_AS(scar_label(s.dataset, 0.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(scar_label(s.dataset, 1.5, 1), std::invalid_argument);
  }
}

TEST_CASE("separation knob collapses or spreads the classes") {
  auto mean_presence_posterior = [](double separation) {
    const Scene s = generate_scene(testutil::mini_scene_spec(800, separation), 6);
    double sum = 0;
    std::size_t n = 0;
    for (const Sample& x : s.dataset.samples)
      if (x.label.truth == Truth::presence) {
        sum += analytic_posterior_normalized(s, x.features);
        ++n;
      }
    return sum / static_cast<double>(n);
  };
  // collapsed classes carry little information about presence; wide
  // separation makes presences near-certain
  CHECK(mean_presence_posterior(0.0) < 0.6);
  CHECK(mean_presence_posterior(3.0) > 0.95);
}
