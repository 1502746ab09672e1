#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstring>
#include <numeric>

#include "hazard/individual.hpp"

using namespace hazard;

namespace {

const PayoffSupport kUnit(0.0, 1.0);
PayoffDist bern(double p) { return PayoffDist({{0.0, 1.0 - p}, {1.0, p}}, kUnit); }

Environment two_arm(double p0, double p1) {
  return Environment::iid(kUnit, {bern(p0), bern(p1)});
}

// Checks that fn throws E and that the message mentions `needle`.
template <typename E, typename Fn>
bool throws_containing(Fn&& fn, const char* needle) {
  try {
    fn();
  } catch (const E& e) {
    return std::strstr(e.what(), needle) != nullptr;
  } catch (...) {
    return false;
  }
  return false;
}

}  // namespace

// --- monotone: canonical family ---------------------------------------------

TEST_CASE("canonical monotone update moves all mass on a sure top payoff") {
  const auto params = MonotoneParams::canonical_family(1.0);
  const std::vector<double> sigma{0.5, 0.5};
  // t=0, c=1: gain g = x, so x=1 sends everything to the chosen action.
  const auto full = monotone_update(0, 1.0, params, sigma, 0);
  CHECK(full[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(full[1] == doctest::Approx(0.0).epsilon(1e-15));

  const auto half = monotone_update(0, 0.5, params, sigma, 0);
  CHECK(half[0] == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(half[1] == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("canonical monotone update shrinks like 1/(t+1)") {
  const auto params = MonotoneParams::canonical_family(0.5);
  const std::vector<double> sigma{0.4, 0.6};
  // g = (1-c)/(t+1) + c x/(t+1); t=4, x=1 gives g = 0.2.
  const auto out = monotone_update(1, 1.0, params, sigma, 4);
  CHECK(out[1] == doctest::Approx(0.6 + 0.4 * 0.2).epsilon(1e-14));
  CHECK(out[0] == doctest::Approx(0.4 * 0.8).epsilon(1e-14));
  CHECK(out[0] + out[1] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("monotone update validates its inputs") {
  const auto params = MonotoneParams::canonical_family(1.0);
  const std::vector<double> sigma{0.5, 0.5};
  CHECK_THROWS_AS(monotone_update(2, 0.5, params, sigma, 0), ParamError);
  CHECK_THROWS_AS(monotone_update(-1, 0.5, params, sigma, 0), ParamError);
  CHECK_THROWS_AS(monotone_update(0, 1.5, params, sigma, 0), ParamError);  // not rescaled
  CHECK_THROWS_AS(monotone_update(0, -0.5, params, sigma, 0), ParamError);
  CHECK_THROWS_AS(monotone_update(0, 0.5, params, sigma, -1), ParamError);
  CHECK_THROWS_AS(MonotoneParams::canonical_family(0.0), ParamError);
  CHECK_THROWS_AS(MonotoneParams::canonical_family(1.5), ParamError);
}

// --- monotone: custom tables ------------------------------------------------

TEST_CASE("custom monotone tables validate shape, symmetry and diagonals") {
  // Valid 2-action table: zero diagonal, symmetric off-diagonal, A+B <= 1.
  CHECK_NOTHROW(MonotoneParams::custom(2, {0.0, 0.2, 0.2, 0.0}, {0.0, 0.5, 0.5, 0.0}));

  // Diagonal entries are derived at update time and must be left at zero.
  CHECK(throws_containing<ParamError>(
      [] { MonotoneParams::custom(2, {0.1, 0.2, 0.2, 0.0}, {0.0, 0.5, 0.5, 0.0}); },
      "derive their diagonals"));
  // Asymmetric off-diagonal.
  CHECK(throws_containing<ParamError>(
      [] { MonotoneParams::custom(2, {0.0, 0.2, 0.3, 0.0}, {0.0, 0.5, 0.5, 0.0}); },
      "symmetric"));
  // A + B > 1 on a pair.
  CHECK(throws_containing<ParamError>(
      [] { MonotoneParams::custom(2, {0.0, 0.6, 0.6, 0.0}, {0.0, 0.5, 0.5, 0.0}); },
      "A + B <= 1"));
  // Wrong size.
  CHECK_THROWS_AS(MonotoneParams::custom(2, {0.0, 0.2, 0.2}, {0.0, 0.5, 0.5, 0.0}), ParamError);
  // Negative payoff coefficient.
  CHECK_THROWS_AS(MonotoneParams::custom(2, {0.0, 0.2, 0.2, 0.0}, {0.0, -0.1, -0.1, 0.0}),
                  ParamError);
  // 3 actions whose positive-B graph splits {0,1} from {2}: no cross-mixing.
  CHECK(throws_containing<ParamError>(
      [] {
        MonotoneParams::custom(3,
                               {0.0, 0.1, 0.1, 0.1, 0.0, 0.1, 0.1, 0.1, 0.0},
                               {0.0, 0.3, 0.0, 0.3, 0.0, 0.0, 0.0, 0.0, 0.0});
      },
      "disconnected"));
}

TEST_CASE("custom monotone rows stay on the simplex and report their convention") {
  const auto params = MonotoneParams::custom(3,
                                             {0.0, 0.1, 0.2, 0.1, 0.0, 0.05, 0.2, 0.05, 0.0},
                                             {0.0, 0.3, 0.2, 0.3, 0.0, 0.4, 0.2, 0.4, 0.0});
  const std::vector<double> sigma{0.2, 0.5, 0.3};
  for (int chosen = 0; chosen < 3; ++chosen) {
    for (double x : {0.0, 0.3, 1.0}) {
      const auto out = monotone_update(chosen, x, params, sigma, 7);
      const double sum = std::accumulate(out.begin(), out.end(), 0.0);
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-15));
      for (double v : out) CHECK(v >= 0.0);
    }
  }
  CHECK(params.validation_report().find("diagonal convention") != std::string::npos);
  CHECK(MonotoneParams::canonical_family(0.5).validation_report().find("canonical") !=
        std::string::npos);
}

TEST_CASE("monotone expected change matches the closed form at the canonical oracle") {
  // Bern(0.9) vs Bern(0.5), sigma = (1/2,1/2), c=1, t=0:
  // E[d sigma(0)] = sigma0 sigma1 * c/(t+1) * (m0 - m1) = 0.25 * 0.4 = 0.1.
  const auto params = MonotoneParams::canonical_family(1.0);
  const auto env = two_arm(0.9, 0.5);
  const std::vector<double> sigma{0.5, 0.5};
  const auto d = monotone_expected_change(params, env, sigma, 0);
  CHECK(d[0] == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(d[1] == doctest::Approx(-0.1).epsilon(1e-12));
}

TEST_CASE("monotone expected change equals full outcome enumeration") {
  const auto params = MonotoneParams::custom(2, {0.0, 0.15, 0.15, 0.0}, {0.0, 0.6, 0.6, 0.0});
  const auto env = two_arm(0.8, 0.3);
  const std::vector<double> sigma{0.35, 0.65};
  MonotoneModel model(params, env, sigma);

  SystemState state;
  state.t = 3;
  state.config = Configuration::single(sigma);
  const auto outcomes = model.enumerate_outcomes(state);
  double total_prob = 0.0;
  std::vector<double> mean_change(2, 0.0);
  for (const auto& o : outcomes) {
    total_prob += o.prob;
    for (int a = 0; a < 2; ++a) mean_change[a] += o.prob * (o.proposed(0, a) - sigma[a]);
  }
  CHECK(total_prob == doctest::Approx(1.0).epsilon(1e-15));

  const auto closed = monotone_expected_change(params, env, sigma, 3);
  CHECK(mean_change[0] == doctest::Approx(closed[0]).epsilon(1e-13));
  CHECK(mean_change[1] == doctest::Approx(closed[1]).epsilon(1e-13));
}

TEST_CASE("monotone model wiring checks") {
  const auto env = two_arm(0.9, 0.5);
  CHECK_THROWS_AS(MonotoneModel(MonotoneParams::canonical_family(1.0), env, {0.5, 0.3}),
                  ParamError);  // not a distribution
  CHECK_THROWS_AS(MonotoneModel(MonotoneParams::canonical_family(1.0), env, {0.5, 0.25, 0.25}),
                  ParamError);  // wrong length
  const auto three = MonotoneParams::custom(3,
                                            {0.0, 0.1, 0.1, 0.1, 0.0, 0.1, 0.1, 0.1, 0.0},
                                            {0.0, 0.3, 0.3, 0.3, 0.0, 0.3, 0.3, 0.3, 0.0});
  CHECK_THROWS_AS(MonotoneModel(three, env, {0.5, 0.5}), ParamError);  // table/env mismatch

  MonotoneModel model(MonotoneParams::canonical_family(1.0), env, {0.5, 0.5});
  CHECK(model.num_individuals() == 1);
  CHECK(model.num_actions() == 2);
  CHECK(std::string(model.name()) == "monotone");
  // Two uniforms per step: action device then payoff draw.
  SystemState state;
  state.config = model.initial_config();
  Configuration proposed = Configuration::zeros(1, 2);
  SplitMix64 rng(99);
  const std::uint64_t before = rng.state;
  model.propose_into(state, rng, proposed);
  CHECK(rng.state == before + 2 * SplitMix64::kGamma);
}

// --- switch functions --------------------------------------------------------

TEST_CASE("linear switch is antisymmetric and range-checked") {
  const auto g = SwitchFunction::linear(1.0);
  CHECK(g.eval(0.25, 0.75) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(g.eval(0.75, 0.25) == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(g.eval(0.4, 0.4) == 0.0);
  CHECK_NOTHROW(g.validate_on(PayoffSupport{0.0, 1.0}));
  // Slope times range must stay within the probability budget.
  CHECK_THROWS_AS(SwitchFunction::linear(2.0).validate_on(PayoffSupport{0.0, 1.0}), ParamError);
  CHECK_NOTHROW(SwitchFunction::linear(2.0).validate_on(PayoffSupport{0.0, 0.5}));
  CHECK_THROWS_AS(SwitchFunction::linear(-1.0), ParamError);
}

TEST_CASE("power switch needs payoffs inside the unit interval") {
  const auto g = SwitchFunction::power(0.5, 2.0);
  CHECK(g.eval(0.5, 1.0) == doctest::Approx(0.375).epsilon(1e-15));
  CHECK(g.eval(1.0, 0.5) == doctest::Approx(-0.375).epsilon(1e-15));
  CHECK_NOTHROW(g.validate_on(PayoffSupport{0.0, 1.0}));
  CHECK_THROWS_AS(g.validate_on(PayoffSupport{0.0, 2.0}), ParamError);
  CHECK_THROWS_AS(SwitchFunction::power(1.5, 1.0), ParamError);
  CHECK_THROWS_AS(SwitchFunction::power(0.5, 0.0), ParamError);
}

TEST_CASE("switch tables look up grid pairs and reject off-grid payoffs") {
  const std::vector<double> grid{0.0, 0.5, 1.0};
  // Table of 0.5*(x2 - x1): antisymmetric, nondecreasing in x2.
  const std::vector<double> values{0.0,   0.25,  0.5,   //
                                   -0.25, 0.0,   0.25,  //
                                   -0.5,  -0.25, 0.0};
  const auto g = SwitchFunction::table(grid, values);
  CHECK(g.eval(0.5, 1.0) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(g.eval(1.0, 0.0) == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(throws_containing<ParamError>([&] { (void)g.eval(0.25, 1.0); },
                                      "not on the switch-table grid"));
  CHECK_NOTHROW(g.validate_on(PayoffSupport{0.0, 1.0}));
  CHECK_THROWS_AS(g.validate_on(PayoffSupport{0.25, 1.0}), ParamError);  // grid sticks out
}

TEST_CASE("switch table construction rejects malformed tables") {
  const std::vector<double> grid{0.0, 0.5, 1.0};
  CHECK_THROWS_AS(SwitchFunction::table({0.0, 0.0}, {0.0, 0.0, 0.0, 0.0}), ParamError);
  CHECK_THROWS_AS(SwitchFunction::table(grid, {0.0, 0.25}), ParamError);  // size mismatch
  // Antisymmetry broken at (0, 0.5).
  CHECK(throws_containing<ParamError>(
      [&] {
        SwitchFunction::table(grid, {0.0, 0.25, 0.5, -0.3, 0.0, 0.25, -0.5, -0.25, 0.0});
      },
      "antisymmetry"));
  // Negative value on an improving pair (antisymmetry intact).
  CHECK(throws_containing<ParamError>(
      [&] {
        SwitchFunction::table(grid, {0.0, -0.1, 0.5, 0.1, 0.0, 0.25, -0.5, -0.25, 0.0});
      },
      "improving pair"));
  // Not nondecreasing in the second argument along row 0 (0.5 then 0.25).
  CHECK(throws_containing<ParamError>(
      [&] {
        SwitchFunction::table(grid, {0.0, 0.5, 0.25, -0.5, 0.0, 0.25, -0.25, -0.25, 0.0});
      },
      "nondecreasing"));
  // Value outside [-1, 1].
  CHECK_THROWS_AS(SwitchFunction::table({0.0, 1.0}, {0.0, 1.5, -1.5, 0.0}), ParamError);
}

// --- full-information rule ---------------------------------------------------

TEST_CASE("full-information update shifts mass toward the better payoff") {
  const auto g = SwitchFunction::linear(1.0);
  const std::vector<double> sigma{0.5, 0.5};
  const std::vector<double> payoffs{1.0, 0.0};
  const auto out = full_info_update(payoffs, g, sigma);
  CHECK(out[0] == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(out[1] == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(out[0] + out[1] == doctest::Approx(1.0).epsilon(1e-15));

  // Equal payoffs leave the mixture alone.
  const auto fixed = full_info_update(std::vector<double>{0.7, 0.7}, g, sigma);
  CHECK(fixed[0] == 0.5);
  CHECK(fixed[1] == 0.5);

  CHECK_THROWS_AS(full_info_update(std::vector<double>{1.0}, g, sigma), ParamError);
}

TEST_CASE("full-information enumeration: probabilities and mean motion") {
  const auto env = two_arm(0.9, 0.5);
  FullInfoModel model(SwitchFunction::linear(1.0), env, {0.5, 0.5});
  CHECK(std::string(model.name()) == "full_info");

  SystemState state;
  state.config = model.initial_config();
  const auto outcomes = model.enumerate_outcomes(state);
  REQUIRE(outcomes.size() == 4);  // 2 atoms per action
  double total = 0.0;
  double mean_change0 = 0.0;
  for (const auto& o : outcomes) {
    total += o.prob;
    mean_change0 += o.prob * (o.proposed(0, 0) - 0.5);
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-15));
  // E[d sigma(0)] = sigma0 sigma1 E[x0 - x1] = 0.25 * 0.4.
  CHECK(mean_change0 == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("full-information proposals use one payoff draw per action") {
  const auto env = two_arm(0.9, 0.5);
  FullInfoModel model(SwitchFunction::linear(1.0), env, {0.5, 0.5});
  SystemState state;
  state.config = model.initial_config();
  Configuration proposed = Configuration::zeros(1, 2);
  SplitMix64 rng(7);
  const std::uint64_t before = rng.state;
  model.propose_into(state, rng, proposed);
  // No action-device draw: exactly |A| = 2 uniforms consumed.
  CHECK(rng.state == before + 2 * SplitMix64::kGamma);

  // The same uniforms fed by hand reproduce the proposal bit for bit.
  SplitMix64 replay(7);
  std::vector<double> payoffs{env.dist(0, 0).draw_from_uniform(replay.next_double()),
                              env.dist(0, 1).draw_from_uniform(replay.next_double())};
  const auto expect = full_info_update(payoffs, model.switch_fn(), state.config.row(0));
  CHECK(proposed(0, 0) == expect[0]);
  CHECK(proposed(0, 1) == expect[1]);
}

TEST_CASE("full-information model rejects incompatible switch functions") {
  const auto env = two_arm(0.9, 0.5);
  CHECK_THROWS_AS(FullInfoModel(SwitchFunction::linear(2.0), env, {0.5, 0.5}), ParamError);
  CHECK_THROWS_AS(FullInfoModel(SwitchFunction::linear(1.0), env, {0.5, 0.5, 0.0}), ParamError);
}

// --- cumulative reinforcement ------------------------------------------------

TEST_CASE("reinforcement update adds the payoff to the chosen attraction") {
  const std::vector<double> f{5.0, 5.0};
  std::vector<double> row(2), f_out(2);
  roth_erev_update(0, 1.0, f, row, f_out);
  CHECK(row[0] == doctest::Approx(6.0 / 11.0).epsilon(1e-15));
  CHECK(row[1] == doctest::Approx(5.0 / 11.0).epsilon(1e-15));
  CHECK(f_out[0] == 6.0);
  CHECK(f_out[1] == 5.0);

  // Zero payoff leaves both the attractions and the mixture unchanged.
  roth_erev_update(1, 0.0, f, row, f_out);
  CHECK(row[0] == 0.5);
  CHECK(row[1] == 0.5);
  CHECK(f_out[0] == 5.0);
  CHECK(f_out[1] == 5.0);
}

TEST_CASE("reinforcement update supports in-place attraction aliasing") {
  std::vector<double> f{5.0, 5.0};
  std::vector<double> row(2);
  roth_erev_update(0, 1.0, f, row, f);  // attractions_out aliases attractions
  CHECK(f[0] == 6.0);
  CHECK(f[1] == 5.0);
  CHECK(row[0] == doctest::Approx(6.0 / 11.0).epsilon(1e-15));
}

TEST_CASE("reinforcement update validates its inputs") {
  const std::vector<double> f{5.0, 5.0};
  std::vector<double> row(2), f_out(2);
  CHECK_THROWS_AS(roth_erev_update(2, 1.0, f, row, f_out), ParamError);
  CHECK_THROWS_AS(roth_erev_update(0, -0.5, f, row, f_out), ParamError);
  std::vector<double> bad{5.0, 0.0};
  CHECK_THROWS_AS(roth_erev_update(0, 1.0, bad, row, f_out), ParamError);
  std::vector<double> short_row(1);
  CHECK_THROWS_AS(roth_erev_update(0, 1.0, f, short_row, f_out), ParamError);
}

TEST_CASE("reinforcement inertia rate is x_max over the attraction total") {
  CHECK(roth_erev_theta(11.0, 1.0) == doctest::Approx(1.0 / 11.0).epsilon(1e-15));
  CHECK_THROWS_AS(roth_erev_theta(1.0, 1.0), ParamError);
  CHECK_THROWS_AS(roth_erev_theta(0.5, 1.0), ParamError);
}

TEST_CASE("reinforcement model enforces the attraction-mass precondition") {
  const auto env = two_arm(0.9, 0.4);  // gap 0.5, x_max 1 -> need V0 > 4
  RothErevModel model(env, {5.5, 5.5});
  CHECK(model.mean_gap() == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(model.initial_total() == doctest::Approx(11.0).epsilon(1e-15));
  CHECK(model.initial_config()(0, 0) == 0.5);
  CHECK(model.initial_info() == std::vector<double>{5.5, 5.5});
  CHECK(std::string(model.name()) == "roth_erev");

  CHECK(throws_containing<ParamError>([&] { RothErevModel(env, {1.0, 1.0}); }, "need V0 >"));
  CHECK_THROWS_AS(RothErevModel(env, {5.5, -1.0}), ParamError);
  CHECK_THROWS_AS(RothErevModel(env, {5.5}), ParamError);
  const PayoffSupport wide(-1.0, 1.0);
  const auto negative_support =
      Environment::iid(wide, {PayoffDist({{-1.0, 0.1}, {1.0, 0.9}}, wide),
                              PayoffDist({{0.0, 0.6}, {1.0, 0.4}}, wide)});
  CHECK_THROWS_AS(RothErevModel(negative_support, {5.5, 5.5}), ParamError);
}

TEST_CASE("reinforcement enumeration over choice and payoff atoms") {
  const auto env = two_arm(0.9, 0.4);
  RothErevModel model(env, {5.5, 5.5});
  SystemState state;
  state.config = model.initial_config();
  state.info = model.initial_info();
  const auto outcomes = model.enumerate_outcomes(state);
  REQUIRE(outcomes.size() == 4);
  // Order: (chosen, payoff atom ascending) = (0,0), (0,1), (1,0), (1,1).
  CHECK(outcomes[0].prob == doctest::Approx(0.05).epsilon(1e-15));
  CHECK(outcomes[1].prob == doctest::Approx(0.45).epsilon(1e-15));
  CHECK(outcomes[2].prob == doctest::Approx(0.30).epsilon(1e-15));
  CHECK(outcomes[3].prob == doctest::Approx(0.20).epsilon(1e-15));
  CHECK(outcomes[0].proposed(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(outcomes[1].proposed(0, 0) == doctest::Approx(6.5 / 12.0).epsilon(1e-15));
  CHECK(outcomes[2].proposed(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(outcomes[3].proposed(0, 0) == doctest::Approx(5.5 / 12.0).epsilon(1e-15));

  SystemState bad = state;
  bad.info = {5.5};
  CHECK_THROWS_AS(model.enumerate_outcomes(bad), ParamError);
}

TEST_CASE("reinforcement proposals update the live attraction state") {
  const auto env = two_arm(0.9, 0.4);
  RothErevModel model(env, {5.5, 5.5});
  SystemState state;
  state.config = model.initial_config();
  state.info = model.initial_info();
  Configuration proposed = Configuration::zeros(1, 2);
  SplitMix64 rng(321);
  model.propose_into(state, rng, proposed);
  const double gained = state.info[0] + state.info[1] - 11.0;
  CHECK((gained == 0.0 || gained == 1.0));  // Bernoulli payoff landed in the attractions
  const double total = state.info[0] + state.info[1];
  CHECK(proposed(0, 0) == doctest::Approx(state.info[0] / total).epsilon(1e-15));
}
