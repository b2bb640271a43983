#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <array>
#include <cmath>
#include <vector>

#include "samc/mixture.hpp"
#include "samc/rng.hpp"

using namespace samc;

static_assert(TargetModel<MixtureTarget>);

namespace {

// Reference density, written independently of the library: direct sum of the
// three component densities in ordinary (non-log) arithmetic. Valid wherever
// the density is not so small that exp underflows, which covers every point
// these tests probe.
double ref_log_density(double x, double y) {
  const double means[3][2] = {{-8.0, -8.0}, {6.0, 6.0}, {0.0, 0.0}};
  const double rhos[3] = {0.9, -0.9, 0.0};
  const double two_pi = 2.0 * std::acos(-1.0);
  double f = 0.0;
  for (int c = 0; c < 3; ++c) {
    const double dx = x - means[c][0];
    const double dy = y - means[c][1];
    const double det = 1.0 - rhos[c] * rhos[c];
    const double q = (dx * dx - 2.0 * rhos[c] * dx * dy + dy * dy) / det;
    f += std::exp(-0.5 * q) / (two_pi * std::sqrt(det));
  }
  return std::log(f / 3.0);
}

}  // namespace

TEST_CASE("log_density matches an independent direct-sum evaluation") {
  const MixtureTarget t;
  const double pts[][2] = {{0.0, 0.0}, {-8.0, -8.0}, {6.0, 6.0},  {2.0, -1.0},
                           {-4.0, 1.5}, {7.2, 5.1},  {-9.0, -6.5}, {0.3, 12.0}};
  for (const auto& p : pts)
    CHECK(t.log_density({p[0], p[1]}) ==
          doctest::Approx(ref_log_density(p[0], p[1])).epsilon(1e-12));

  // At the spherical component's mode the other two are negligible:
  // f ~ (1/3) / (2 pi), so lambda ~ log(6 pi).
  CHECK(t.log_density({0.0, 0.0}) ==
        doctest::Approx(-std::log(6.0 * std::acos(-1.0))).epsilon(1e-10));
}

TEST_CASE("log_density is exactly symmetric under swapping the coordinates") {
  // All three means lie on the diagonal and the quadratic form is grouped so
  // the two orders run through identical arithmetic.
  const MixtureTarget t;
  RngStream rng(101);
  for (int i = 0; i < 1000; ++i) {
    const double a = -12.0 + 24.0 * rng.uniform();
    const double b = -12.0 + 24.0 * rng.uniform();
    CHECK(t.log_density({a, b}) == t.log_density({b, a}));
  }
}

TEST_CASE("energy partition: 45 half-open cells of width 0.5 with clamped tails") {
  const MixtureTarget t;
  CHECK(t.region_count() == 45);
  CHECK(t.lambda_scale() == 22.0);
  const PartitionSpec& p = t.partition();
  CHECK(p.region_for_lambda(0.0) == 1);
  CHECK(p.region_for_lambda(0.49) == 1);
  CHECK(p.region_for_lambda(0.5) == 2);
  CHECK(p.region_for_lambda(2.49) == 5);
  CHECK(p.region_for_lambda(2.5) == 6);
  CHECK(p.region_for_lambda(21.99) == 44);
  CHECK(p.region_for_lambda(22.0) == 45);
  CHECK(p.region_for_lambda(1000.0) == 45);
}

TEST_CASE("evaluate bundles density, energy and region consistently") {
  const MixtureTarget t;
  RngStream rng(102);
  for (int i = 0; i < 200; ++i) {
    const MixtureTarget::State x{-10.0 + 20.0 * rng.uniform(),
                                 -10.0 + 20.0 * rng.uniform()};
    const StateEval ev = t.evaluate(x);
    CHECK(ev.log_psi == t.log_density(x));
    CHECK(ev.lambda == -t.log_density(x));
    CHECK(ev.region == t.region_index(x));
    CHECK(ev.region == t.partition().region_for_lambda(ev.lambda));
    const auto prop = t.propose(x, rng);
    REQUIRE(prop.has_value());
    CHECK(prop->log_ratio == 0.0);
  }
}

TEST_CASE("exact sampling reproduces the component and mixture moments") {
  const MixtureTarget t;
  const int n = 200000;

  SUBCASE("spherical component") {
    RngStream rng(103);
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
      const auto s = t.sample_component(2, rng);
      sx += s[0]; sy += s[1];
      sxx += s[0] * s[0]; syy += s[1] * s[1]; sxy += s[0] * s[1];
    }
    CHECK(std::abs(sx / n) < 0.02);
    CHECK(std::abs(sy / n) < 0.02);
    CHECK(std::abs(sxx / n - 1.0) < 0.02);
    CHECK(std::abs(syy / n - 1.0) < 0.02);
    CHECK(std::abs(sxy / n) < 0.02);
  }

  SUBCASE("correlated component") {
    RngStream rng(104);
    double sx = 0, sy = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
      const auto s = t.sample_component(0, rng);
      const double dx = s[0] + 8.0, dy = s[1] + 8.0;
      sx += dx; sy += dy; sxy += dx * dy;
    }
    CHECK(std::abs(sx / n) < 0.02);
    CHECK(std::abs(sy / n) < 0.02);
    CHECK(std::abs(sxy / n - 0.9) < 0.02);
  }

  SUBCASE("full mixture mean") {
    RngStream rng(105);
    double sx = 0, sy = 0;
    for (int i = 0; i < n; ++i) {
      const auto s = t.sample(rng);
      sx += s[0]; sy += s[1];
    }
    CHECK(std::abs(sx / n + 2.0 / 3.0) < 0.06);
    CHECK(std::abs(sy / n + 2.0 / 3.0) < 0.06);
  }

  CHECK_THROWS_AS(([&] {
                    RngStream rng(1);
                    (void)t.sample_component(3, rng);
                  }()),
                  std::invalid_argument);
}

TEST_CASE("reference region probabilities: support, normalization, stability") {
  const MixtureTarget t;
  const auto p = t.true_region_probs(1000000, 2024);

  REQUIRE(p.size() == 45);
  double sum = 0.0;
  for (double v : p) sum += v;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));

  // The attainable energy minimum is log(6 pi) + 0.5 log(0.19) ~ 2.106 at the
  // correlated modes, so the first four cells are structurally empty.
  for (int i = 0; i < 4; ++i) CHECK(p[i] == 0.0);
  CHECK(p[4] > 0.0);

  // Coarse anchors: the first occupied cell carries a fifth of the mass, the
  // deep tail almost none.
  CHECK(p[4] > 0.15);
  CHECK(p[4] < 0.28);
  CHECK(p[44] < 1e-3);

  // Same seed: identical. Different seed: within Monte Carlo error.
  const auto q = t.true_region_probs(1000000, 2024);
  CHECK(p == q);
  const auto r = t.true_region_probs(1000000, 999);
  for (std::size_t i = 0; i < p.size(); ++i) CHECK(std::abs(p[i] - r[i]) < 0.003);

  CHECK_THROWS_AS(t.true_region_probs(0, 1), std::invalid_argument);
}

TEST_CASE("rmse aggregates per-index error across runs") {
  const std::vector<double> truth{0.2, 0.5, 0.3};

  const std::vector<std::vector<double>> exact{{0.2, 0.5, 0.3}};
  CHECK(rmse(exact, truth) == std::vector<double>{0.0, 0.0, 0.0});

  const std::vector<std::vector<double>> two{{0.3, 0.5, 0.25}, {0.1, 0.5, 0.35}};
  const auto e = rmse(two, truth);
  CHECK(e[0] == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(e[1] == 0.0);
  CHECK(e[2] == doctest::Approx(0.05).epsilon(1e-12));

  CHECK_THROWS_AS(rmse({}, truth), std::invalid_argument);
  CHECK_THROWS_AS(rmse({{0.5, 0.5}}, truth), std::invalid_argument);
}
