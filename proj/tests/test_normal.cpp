#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "medstream/errors.hpp"
#include "medstream/normal.hpp"
#include "support/oracles.hpp"

using medstream::normal_cdf;
using medstream::normal_quantile;
using medstream::normal_two_sided_p;

TEST_CASE("cdf matches the independent series/continued-fraction oracle") {
  // absolute error must stay below 1e-15 so tiny p-values remain meaningful
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> wide(-9.0, 9.0);
  for (int i = 0; i < 20000; ++i) {
    const double x = wide(gen);
    CHECK(std::fabs(normal_cdf(x) - oracle::normal_cdf(x)) < 1e-15);
  }
  CHECK(normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(normal_cdf(2.0) == doctest::Approx(0.97724986805182079).epsilon(1e-14));
  CHECK(normal_cdf(-5.5) == doctest::Approx(1.8989562465887719e-8).epsilon(1e-12));
}

TEST_CASE("two-sided tail keeps relative accuracy far out") {
  for (double t : {0.5, 1.0, 2.0, 3.5, 5.0, 9.0, 15.0, 25.0}) {
    const double got = normal_two_sided_p(t);
    const double want = oracle::two_sided_p(t);
    CHECK(got == doctest::Approx(want).epsilon(1e-12));
    CHECK(normal_two_sided_p(-t) == got);
  }
  CHECK(normal_two_sided_p(0.0) == 1.0);
  CHECK(normal_two_sided_p(9.0) == doctest::Approx(2.2571768119076813e-19).epsilon(1e-12));
}

TEST_CASE("quantile inverts the cdf") {
  CHECK(normal_quantile(0.5) == 0.0);
  CHECK(normal_quantile(0.975) == doctest::Approx(1.9599639845400542).epsilon(1e-14));
  CHECK(normal_quantile(0.9) == doctest::Approx(1.2815515655446005).epsilon(1e-14));
  CHECK(normal_quantile(0.025) == doctest::Approx(-1.9599639845400542).epsilon(1e-14));
  CHECK(normal_quantile(1e-10) == doctest::Approx(-6.3613409024040562).epsilon(1e-13));

  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> unit(1e-12, 1.0 - 1e-12);
  for (int i = 0; i < 5000; ++i) {
    const double p = unit(gen);
    const double z = normal_quantile(p);
    CHECK(oracle::normal_cdf(z) == doctest::Approx(p).epsilon(1e-12));
  }
}

TEST_CASE("quantile rejects probabilities outside [0,1]") {
  CHECK_THROWS_AS(normal_quantile(-0.1), medstream::InputError);
  CHECK_THROWS_AS(normal_quantile(1.5), medstream::InputError);
  CHECK(std::isinf(normal_quantile(0.0)));
  CHECK(std::isinf(normal_quantile(1.0)));
}
