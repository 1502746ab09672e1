#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "hazard/automata.hpp"

using namespace hazard;

TEST_CASE("absorbing step function") {
  CHECK(absorbing_step(0.5, 0.75) == 1.0);      // u <= (1+sigma)/2
  CHECK(absorbing_step(0.5, 0.7500001) == 0.0);
  CHECK(absorbing_step(0.0, 0.0) == 0.0);       // 0 is absorbing
  CHECK(absorbing_step(1.0, 0.9999) == 1.0);
}

TEST_CASE("absorbing model: exact outcome distribution") {
  const AbsorbingModel m(0.5);
  SystemState s;
  s.config = m.initial_config();

  const auto outcomes = m.enumerate_outcomes(s);
  REQUIRE(outcomes.size() == 2);
  CHECK(outcomes[0].prob == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(outcomes[0].proposed(0, 0) == 1.0);
  CHECK(outcomes[1].prob == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(outcomes[1].proposed(0, 0) == 0.0);

  SystemState at_zero;
  at_zero.config = Configuration::single({0.0, 1.0});
  const auto absorbed = m.enumerate_outcomes(at_zero);
  REQUIRE(absorbed.size() == 1);
  CHECK(absorbed[0].prob == 1.0);
  CHECK(absorbed[0].proposed(0, 0) == 0.0);

  CHECK_THROWS_AS(AbsorbingModel(1.5), ParamError);
}

TEST_CASE("two-armed step function truth table") {
  // beta=0.5, sigma=0.4. Device w3 <= sigma plus a success on the better
  // arm moves up; w3 > sigma plus a success on the inferior arm moves down.
  CHECK(automaton_step(0.4, 0.5, false, true, 0.4) == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(automaton_step(0.4, 0.5, true, true, 0.41) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(automaton_step(0.4, 0.5, false, false, 0.4) == 0.4);   // chosen arm missed
  CHECK(automaton_step(0.4, 0.5, false, false, 0.9) == 0.4);
  CHECK(automaton_step(0.4, 0.5, true, false, 0.4) == 0.4);    // unchosen arm's flag ignored
}

TEST_CASE("two-armed parameter validation and floor") {
  TwoArmedParams p;  // defaults 0.5 / 0.5 / 0.8 / 0.5
  p.validate();
  CHECK(p.gain_floor() == doctest::Approx(0.15).epsilon(1e-15));

  TwoArmedParams bad = p;
  bad.mu1 = 0.9;
  CHECK_THROWS_AS(bad.validate(), ParamError);
  bad = p;
  bad.beta = 1.0;
  CHECK_THROWS_AS(bad.validate(), ParamError);
  bad = p;
  bad.sigma0 = -0.1;
  CHECK_THROWS_AS(bad.validate(), ParamError);
}

TEST_CASE("two-armed model: expected gain is exactly the floor times P(1-P)") {
  TwoArmedParams p;
  const TwoArmedAutomaton m(p);
  SystemState s;
  s.config = Configuration::single({0.5, 0.5});  // row is (1-sigma, sigma)

  const auto outcomes = m.enumerate_outcomes(s);
  double totalize = 0.0;
  double mean_next = 0.0;
  for (const auto& o : outcomes) {
    totalize += o.prob;
    mean_next += o.prob * o.proposed(0, 1);
  }
  CHECK(totalize == doctest::Approx(1.0).epsilon(1e-15));
  // E[sigma'] - sigma = (1-beta)(mu2-mu1) sigma (1-sigma).
  CHECK(mean_next - 0.5 == doctest::Approx(0.15 * 0.25).epsilon(1e-12));
}

TEST_CASE("inferior-lock truncation: frozen values, monotone in the cutoff") {
  TwoArmedParams p;  // beta=0.5, mu1=0.5, sigma0=0.5
  CHECK(inferior_lock_lower_bound(p, 1) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(inferior_lock_lower_bound(p, 2) == doctest::Approx(0.10546875).epsilon(1e-15));
  CHECK(inferior_lock_lower_bound(p, 50) ==
        doctest::Approx(0.028786319710152903).epsilon(1e-12));

  double prev = 1.0;
  for (int n = 1; n <= 12; ++n) {
    const double b = inferior_lock_lower_bound(p, n);
    CHECK(b <= prev);
    CHECK(b > 0.0);
    prev = b;
  }

  CHECK_THROWS_AS(inferior_lock_lower_bound(p, 0), ParamError);
}
