#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "roughcurve/errors.hpp"
#include "roughcurve/spectrum.hpp"

using namespace roughcurve;

TEST_CASE("normalization constant matches brute-force summation") {
  for (double s : {0.25, 0.5, 1.0, 2.0, 5.0})
    for (double sigma : {1.0, 100.0})
      for (int d : {1, 2, 3}) {
        CAPTURE(s);
        CAPTURE(sigma);
        CAPTURE(d);
        const double expected = oracle::brute_force_c_s(s, sigma, d);
        const double got = normalization_constant<double>(s, sigma, d, 1e-12);
        CHECK(std::abs(got - expected) <= 1e-10 * expected);
      }
}

TEST_CASE("normalization constant spec examples") {
  SUBCASE("s=1, sigma=100, d=1") {
    const double c = normalization_constant<double>(1.0, 100.0, 1);
    CHECK(c == doctest::Approx(oracle::brute_force_c_s(1.0, 100.0, 1)).epsilon(1e-10));
  }
  SUBCASE("s=1, sigma=100, d=3") {
    const double c = normalization_constant<double>(1.0, 100.0, 3);
    CHECK(c == doctest::Approx(oracle::brute_force_c_s(1.0, 100.0, 3)).epsilon(1e-10));
  }
  SUBCASE("invalid parameters") {
    CHECK_THROWS_AS(normalization_constant<double>(0.0, 100.0, 1), ParameterError);
    CHECK_THROWS_AS(normalization_constant<double>(-1.0, 100.0, 1), ParameterError);
    CHECK_THROWS_AS(normalization_constant<double>(1.0, 0.0, 1), ParameterError);
    CHECK_THROWS_AS(normalization_constant<double>(1.0, 100.0, 0), ParameterError);
  }
}

TEST_CASE("build_spectrum values") {
  const Spectrum<double> spec = build_spectrum<double>({1.0, 100.0, 1, 2});
  REQUIRE(spec.lambdas.size() == 4);
  CHECK(spec.lambdas(0) == spec.lambdas(1));
  CHECK(spec.lambdas(2) == spec.lambdas(3));
  CHECK(spec.lambdas(0) / spec.lambdas(2) == doctest::Approx(std::pow(104.0 / 101.0, 3.0)).epsilon(1e-14));
  CHECK(spec.lambdas(0) == doctest::Approx(spec.c_s * std::pow(101.0, -3.0)).epsilon(1e-14));
  CHECK(spec.k() == 2);
  CHECK(spec.pair_value(2) == spec.lambdas(3));
}

TEST_CASE("spectrum invariants") {
  for (double s : {0.01, 0.25, 1.0, 4.0, 9.5})
    for (double sigma : {1.0, 100.0})
      for (int k : {1, 8, 256}) {
        const Spectrum<double> spec = build_spectrum<double>({s, sigma, 1, k});
        CHECK((spec.lambdas.array() > 0).all());
        CHECK(spec.lambdas.sum() <= 1.0 + 1e-14);
        for (int j = 1; j < k; ++j) CHECK(spec.pair_value(j + 1) < spec.pair_value(j));
      }
}

TEST_CASE("energy concentrates at low frequencies as s grows") {
  const int k = 16;
  for (int j = 2; j <= k; ++j) {
    double prev = 2.0;
    for (double s : {0.1, 0.5, 1.0, 2.0, 4.0}) {
      const Spectrum<double> spec = build_spectrum<double>({s, 100.0, 1, k});
      const double ratio = spec.pair_value(j) / spec.pair_value(1);
      CHECK(ratio < prev);
      prev = ratio;
    }
  }
}

TEST_CASE("roughness floor") {
  CHECK_THROWS_AS(build_spectrum<double>({0.0, 100.0, 1, 4}), ParameterError);
  CHECK_NOTHROW(build_spectrum<double>({1e-6, 100.0, 1, 4}));
  CHECK_THROWS_AS(build_spectrum<double>({1e-3, 100.0, 1, 4}, 1e-12, 1e-2), ParameterError);
  CHECK_THROWS_AS(build_spectrum<double>({1.0, 100.0, 1, 0}), ParameterError);
}

TEST_CASE("smoothness bound") {
  CHECK(smoothness_bound(0.375, 1) == doctest::Approx(1.25));
  CHECK(smoothness_bound(1.0, 2) == doctest::Approx(3.0));
  CHECK_THROWS_AS(smoothness_bound(0.0, 1), ParameterError);
}
