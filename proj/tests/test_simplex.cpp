#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "hazard/simplex.hpp"

using namespace hazard;

TEST_CASE("configuration validates shape and rows") {
  CHECK_THROWS_AS(Configuration(1, 1, {1.0}), ParamError);
  CHECK_THROWS_AS(Configuration(0, 2, {}), ParamError);
  CHECK_THROWS_AS(Configuration(1, 2, {0.5, 0.5, 0.5}), ConfigError);
  CHECK_THROWS_AS(Configuration(1, 2, {0.6, 0.6}), ParamError);   // sum 1.2
  CHECK_THROWS_AS(Configuration(1, 2, {-0.1, 1.1}), ParamError);  // far off [0,1]

  const Configuration c(2, 3, {0.2, 0.3, 0.5, 1.0, 0.0, 0.0});
  CHECK(c.num_individuals() == 2);
  CHECK(c.num_actions() == 3);
  CHECK(c(0, 2) == 0.5);
  CHECK(c(1, 0) == 1.0);
}

TEST_CASE("single() keeps the row length") {
  // Regression: the row size must be read before the vector is moved from.
  const Configuration c = Configuration::single({1.0, 0.0});
  CHECK(c.num_individuals() == 1);
  CHECK(c.num_actions() == 2);
  CHECK(c(0, 0) == 1.0);
}

TEST_CASE("rounding-level negatives clamp to +0.0") {
  const Configuration c(1, 2, {-1e-13, 1.0 + 1e-13});
  CHECK(c(0, 0) == 0.0);
  CHECK_FALSE(std::signbit(c(0, 0)));
  CHECK(c(0, 1) == 1.0);
}

TEST_CASE("normalize_row matches its contract") {
  double ok[] = {0.5, 0.5};
  CHECK(normalize_row(ok));
  CHECK(ok[0] == 0.5);

  double tiny_neg[] = {-1e-15, 1.0};
  CHECK(normalize_row(tiny_neg));
  CHECK(tiny_neg[0] == 0.0);
  CHECK_FALSE(std::signbit(tiny_neg[0]));

  double neg[] = {-1e-9, 1.0};
  CHECK_FALSE(normalize_row(neg));

  double short_sum[] = {0.4, 0.4};
  CHECK_FALSE(normalize_row(short_sum));

  double nan_row[] = {std::nan(""), 1.0};
  CHECK_FALSE(normalize_row(nan_row));
}

TEST_CASE("optimal sets are nonempty strict subsets") {
  CHECK_THROWS_AS(OptimalSet(2, {{0, 1}}), ParamError);  // full set
  CHECK_THROWS_AS(OptimalSet(2, {{}}), ParamError);      // empty
  CHECK_THROWS_AS(OptimalSet(2, {{2}}), ParamError);     // out of range
  CHECK_THROWS_AS(OptimalSet(1, {{0}}), ParamError);     // <2 actions

  const OptimalSet s(3, {{2, 0, 2}});
  CHECK(s.of(0) == std::vector<int>{0, 2});  // deduplicated, sorted

  const OptimalSet b = OptimalSet::broadcast(3, 2, {1});
  CHECK(b.num_individuals() == 3);
  CHECK(b.of(2) == std::vector<int>{1});
}

TEST_CASE("aggregate is the population mean optimal mass") {
  const OptimalSet opt = OptimalSet::broadcast(1, 2, {0});
  CHECK(aggregate(Configuration(1, 2, {0.3, 0.7}), opt) == 0.3);

  const OptimalSet opt2 = OptimalSet::broadcast(2, 2, {0});
  const Configuration c(2, 2, {0.3, 0.7, 0.5, 0.5});
  CHECK(aggregate(c, opt2) == doctest::Approx(0.4).epsilon(1e-15));

  CHECK_THROWS_AS(aggregate(Configuration(1, 2, {0.3, 0.7}), opt2), ConfigError);
}

TEST_CASE("slow_step interpolates and copies exactly at theta=1") {
  const Configuration sigma(1, 2, {0.4, 0.6});
  const Configuration prop(1, 2, {0.8, 0.2});

  const Configuration full = slow_step(sigma, prop, 1.0);
  CHECK(full.data() == prop.data());  // bitwise copy, not 0.4 + 1*(0.8-0.4)

  const Configuration half = slow_step(sigma, prop, 0.5);
  CHECK(half(0, 0) == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(half(0, 1) == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(half(0, 0) + half(0, 1) == doctest::Approx(1.0).epsilon(1e-15));

  CHECK_THROWS_AS(slow_step(sigma, prop, 0.0), ParamError);
  CHECK_THROWS_AS(slow_step(sigma, prop, 1.5), ParamError);
  CHECK_THROWS_AS(slow_step(sigma, Configuration(1, 3, {0.2, 0.3, 0.5}), 0.5), ConfigError);
}

TEST_CASE("slow_step_into reports breaches instead of throwing") {
  const Configuration sigma(1, 2, {0.4, 0.6});
  Configuration out = Configuration::zeros(1, 2);
  CHECK(slow_step_into(sigma, Configuration(1, 2, {0.8, 0.2}), 0.5, out));

  // A proposal far off the simplex surfaces as a false return.
  Configuration bad = Configuration::zeros(1, 2);
  bad(0, 0) = 0.9;
  bad(0, 1) = 0.9;
  CHECK_FALSE(slow_step_into(sigma, bad, 1.0, out));
}
