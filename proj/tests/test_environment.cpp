#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "hazard/environment.hpp"
#include "hazard/individual.hpp"
#include "hazard/social.hpp"

using namespace hazard;

namespace {
const PayoffSupport kUnit(0.0, 1.0);

PayoffDist bern(double p) { return PayoffDist({{0.0, 1.0 - p}, {1.0, p}}, kUnit); }
}  // namespace

TEST_CASE("payoff distributions canonicalize their atoms") {
  const PayoffDist d({{1.0, 0.5}, {0.0, 0.3}, {1.0, 0.2}}, kUnit);
  REQUIRE(d.atoms.size() == 2);  // sorted, exact duplicates merged
  CHECK(d.atoms[0].first == 0.0);
  CHECK(d.atoms[0].second == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(d.atoms[1].first == 1.0);
  CHECK(d.atoms[1].second == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(d.mean() == doctest::Approx(0.7).epsilon(1e-15));

  const PayoffDist z({{0.25, 0.0}, {0.5, 1.0}}, kUnit);
  CHECK(z.atoms.size() == 1);  // zero-probability atoms dropped

  CHECK_THROWS_AS(PayoffDist({}, kUnit), ParamError);
  CHECK_THROWS_AS(PayoffDist({{1.5, 1.0}}, kUnit), ParamError);          // off the support
  CHECK_THROWS_AS(PayoffDist({{0.5, 0.9}}, kUnit), ParamError);          // mass 0.9
  CHECK_THROWS_AS(PayoffDist({{0.0, -0.1}, {1.0, 1.1}}, kUnit), ParamError);
}

TEST_CASE("moments and cdf") {
  const PayoffDist d = bern(0.7);
  CHECK(d.mean_pow(2.0) == doctest::Approx(0.7).epsilon(1e-15));  // E[x^2] = p for 0/1
  CHECK(d.cdf(-0.1) == 0.0);
  CHECK(d.cdf(0.0) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(d.cdf(0.5) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(d.cdf(1.0) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("inverse-cdf draw consumes one uniform") {
  // 0.75 keeps the atom boundary exactly representable (1.0 - 0.75 == 0.25).
  const PayoffDist d = bern(0.75);  // atoms (0, 0.25), (1, 0.75)
  CHECK(d.draw_from_uniform(0.0) == 0.0);
  CHECK(d.draw_from_uniform(0.24999) == 0.0);
  CHECK(d.draw_from_uniform(0.25) == 1.0);  // boundary goes to the next atom
  CHECK(d.draw_from_uniform(0.999999) == 1.0);

  SplitMix64 a(12345), b(12345);
  const double x = d.draw(a);
  CHECK(x == d.draw_from_uniform(b.next_double()));
  CHECK(a.state == b.state);
}

TEST_CASE("action device: boundary hits select the next action") {
  const double row[] = {0.3, 0.7};
  CHECK(choose_action(row, 0.0) == 0);
  CHECK(choose_action(row, 0.3) == 1);
  CHECK(choose_action(row, 0.99) == 1);

  // Zero-probability actions are never chosen.
  const double degenerate[] = {0.0, 1.0};
  CHECK(choose_action(degenerate, 0.0) == 1);

  CHECK_THROWS_AS(choose_action(row, 1.0), ParamError);
  CHECK_THROWS_AS(choose_action(row, -0.1), ParamError);
}

TEST_CASE("environments: iid vs per-individual") {
  const Environment iid = Environment::iid(kUnit, {bern(0.9), bern(0.5)}, 3);
  CHECK(iid.num_individuals() == 3);
  CHECK(iid.num_actions() == 2);
  CHECK(iid.identical_across_individuals());
  CHECK(iid.mean(2, 0) == doctest::Approx(0.9).epsilon(1e-15));

  const Environment mixed = Environment::per_individual(
      kUnit, {{bern(0.9), bern(0.5)}, {bern(0.8), bern(0.5)}});
  CHECK_FALSE(mixed.identical_across_individuals());
}

TEST_CASE("expected-payoff optimal sets") {
  const Environment env = Environment::iid(kUnit, {bern(0.9), bern(0.5)});
  const OptimalSet opt = optimal_set_expected(env);
  CHECK(opt.of(0) == std::vector<int>{0});

  // Ties within tolerance are joined.
  const Environment tied = Environment::iid(kUnit, {bern(0.9), bern(0.9), bern(0.2)});
  CHECK(optimal_set_expected(tied).of(0) == std::vector<int>{0, 1});

  // A full tie would make the optimal set non-strict.
  const Environment flat = Environment::iid(kUnit, {bern(0.5), bern(0.5)});
  CHECK_THROWS_AS(optimal_set_expected(flat), ParamError);
}

TEST_CASE("stochastic-dominance optimal sets") {
  const Environment env = Environment::iid(kUnit, {bern(0.9), bern(0.5)});
  CHECK(fosd_dominant_actions(env, 0) == std::vector<int>{0});
  CHECK(optimal_set_fosd(env).of(0) == std::vector<int>{0});

  // Equal means but crossing CDFs: no dominant action.
  const PayoffDist sure({{0.5, 1.0}}, kUnit);
  const Environment crossing = Environment::iid(kUnit, {sure, bern(0.5)});
  CHECK(fosd_dominant_actions(crossing, 0).empty());
  CHECK_THROWS_AS(optimal_set_fosd(crossing), ParamError);
}

TEST_CASE("closed-form hazard floors per model family") {
  const Environment env = Environment::iid(kUnit, {bern(0.9), bern(0.5)});

  CHECK(delta_lower_bound(env, DeltaModel::constant(0.3), 7) == 0.3);

  // Canonical monotone: B_t * (mean gap) / range = (c/(t+1)) * 0.4.
  CHECK(delta_lower_bound(env, DeltaModel::monotone(1.0), 0) ==
        doctest::Approx(0.4).epsilon(1e-15));
  CHECK(delta_lower_bound(env, DeltaModel::monotone(1.0), 1) ==
        doctest::Approx(0.2).epsilon(1e-15));
  CHECK(delta_lower_bound(env, DeltaModel::monotone(0.5), 0) ==
        doctest::Approx(0.2).epsilon(1e-15));

  // Full information: min over (optimal, other) of E[g(x_other, x_opt)].
  const SwitchFunction lin = SwitchFunction::linear(1.0);
  CHECK(delta_lower_bound(env, DeltaModel::full_info(lin), 3) ==
        doctest::Approx(0.4).epsilon(1e-12));
  const SwitchFunction pow1 = SwitchFunction::power(1.0, 1.0);
  CHECK(delta_lower_bound(env, DeltaModel::full_info(pow1), 0) ==
        doctest::Approx(0.4).epsilon(1e-12));

  // Attraction model: gap / (2 (V0 + (t+1) x_max)).
  CHECK(delta_lower_bound(env, DeltaModel::roth_erev(0.4, 11.0), 0) ==
        doctest::Approx(0.4 / 24.0).epsilon(1e-15));
  CHECK(delta_lower_bound(env, DeltaModel::roth_erev(0.4, 11.0), 9) ==
        doctest::Approx(0.4 / 42.0).epsilon(1e-15));

  // Social: lambda_t (W-1) xi delta_tilde. Pairs over W=2: xi = 1.
  const Environment env2 = Environment::iid(kUnit, {bern(0.9), bern(0.5)}, 2);
  const ImitationComponent prop = ImitationComponent::proportional();
  const SamplingProcess pairs = SamplingProcess::uniform_pairs(2);
  const ImitationRate lam = ImitationRate::harmonic();
  CHECK(delta_lower_bound(env2, DeltaModel::social(prop, pairs, lam), 0) ==
        doctest::Approx(0.5 * 1.0 * 1.0 * 0.2).epsilon(1e-12));
}
