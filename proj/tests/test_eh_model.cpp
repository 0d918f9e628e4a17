#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "wpcn/eh_model.hpp"
#include "wpcn/errors.hpp"

using namespace wpcn;

TEST_CASE("rectifier curve against the composed special-function oracle") {
  const auto m = default_rectifier_model();
  CHECK(m->harvested_power(0.0) == 0.0);
  for (double p : {1e-6, 1e-5, 5e-5, 1e-4, 2e-4, 3e-4, 0.4e-3})
    CHECK(m->harvested_power(p) == doctest::Approx(static_cast<double>(oracle::rectifier(p))).epsilon(1e-9));
  CHECK(m->harvested_power(0.2e-3) == doctest::Approx(1.6047044335062e-4).epsilon(1e-9));
  CHECK(m->saturation_output() == doctest::Approx(3.64821243798611e-4).epsilon(1e-9));
}

TEST_CASE("rectifier small-input branch keeps relative precision") {
  const auto m = default_rectifier_model();
  // leading order: r ~ (x^2 / 4) / (1 + mu), x = nu sqrt(2P)
  for (double p : {1e-16, 1e-14, 1e-12}) {
    const double x2 = 2400.0 * 2400.0 * 2 * p;
    const double r = x2 / 4 / 1.03;
    CHECK(m->harvested_power(p) == doctest::Approx(1e-10 * r * r).epsilon(1e-4));
  }
  // continuity across the branch switch at x = 0.02
  const double p_switch = 0.02 * 0.02 / (2 * 2400.0 * 2400.0);
  const double below = m->curve(p_switch * (1 - 1e-9));
  const double above = m->curve(p_switch * (1 + 1e-9));
  CHECK(above == doctest::Approx(below).epsilon(1e-7));
}

TEST_CASE("clamp, monotonicity and convexity") {
  const auto m = default_rectifier_model();
  const double a2 = m->sat_input();
  for (double p : {a2, 1.5 * a2, 10 * a2, 1.0}) CHECK(m->harvested_power(p) == m->saturation_output());
  double prev = -1;
  const int n = 2000;
  std::vector<double> v(n + 1);
  for (int i = 0; i <= n; ++i) {
    v[static_cast<std::size_t>(i)] = m->harvested_power(a2 * i / n);
    CHECK(v[static_cast<std::size_t>(i)] > prev);
    prev = v[static_cast<std::size_t>(i)];
  }
  for (int i = 1; i < n; ++i)
    CHECK(v[static_cast<std::size_t>(i - 1)] - 2 * v[static_cast<std::size_t>(i)] + v[static_cast<std::size_t>(i + 1)] >= -1e-12);
  CHECK_THROWS_AS(m->harvested_power(-1e-9), NegativeInputError);
}

TEST_CASE("inverse harvested power") {
  const auto m = default_rectifier_model();
  CHECK(m->inverse_harvested_power(0.0) == 0.0);
  CHECK(m->inverse_harvested_power(m->saturation_output()) == m->sat_input());
  CHECK_THROWS_AS(m->inverse_harvested_power(m->saturation_output() * 1.001), TargetExceedsSaturationError);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const double p = m->sat_input() * (1e-3 + 0.998 * u(rng));
    CHECK(m->inverse_harvested_power(m->harvested_power(p)) == doctest::Approx(p).epsilon(1e-8));
    const double t = m->saturation_output() * u(rng);
    const double back = m->harvested_power(m->inverse_harvested_power(t));
    CHECK(back >= t);
    CHECK(back <= t * (1 + 1e-8));
  }
}

TEST_CASE("linear saturated model") {
  const LinearSaturatedEhModel m(0.5, 1e-3);
  CHECK(m.saturation_output() == doctest::Approx(0.5e-3));
  CHECK(m.harvested_power(0.4e-3) == doctest::Approx(0.2e-3));
  CHECK(m.harvested_power(5e-3) == doctest::Approx(0.5e-3));
  CHECK(m.inverse_harvested_power(0.2e-3) == doctest::Approx(0.4e-3));
  CHECK(m.inverse_harvested_power(0.5e-3) == 1e-3);
}

TEST_CASE("equal parameters give equal models") {
  const RectifierEhModel a(0.03, 2400, 1e-10, 0.4e-3), b(0.03, 2400, 1e-10, 0.4e-3);
  for (double p : {0.0, 1e-5, 2e-4, 1e-3}) CHECK(a.harvested_power(p) == b.harvested_power(p));
  CHECK_THROWS_AS(RectifierEhModel(0.0, 2400, 1e-10, 0.4e-3), ConfigError);
}
