#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstring>

#include "hazard/automata.hpp"
#include "hazard/diagnostics.hpp"
#include "hazard/individual.hpp"
#include "hazard/schedule.hpp"

using namespace hazard;

namespace {

const PayoffSupport kUnit(0.0, 1.0);
PayoffDist bern(double p) { return PayoffDist({{0.0, 1.0 - p}, {1.0, p}}, kUnit); }

System absorbing_system(double sigma0) {
  System s;
  s.model = std::make_shared<AbsorbingModel>(sigma0);
  s.optimal = OptimalSet::broadcast(1, 2, {0});
  return s;
}

System automaton_system(const TwoArmedParams& params, bool harmonic) {
  System s;
  s.model = std::make_shared<TwoArmedAutomaton>(params);
  s.optimal = OptimalSet::broadcast(1, 2, {1});
  if (harmonic) s.slowing = SlowingSchedule::harmonic();
  return s;
}

// Proposes a row off the simplex; used to check breach propagation.
class RunawayModel final : public Model {
 public:
  int num_individuals() const override { return 1; }
  int num_actions() const override { return 2; }
  Configuration initial_config() const override { return Configuration::single({0.5, 0.5}); }
  void propose_into(SystemState&, SplitMix64& rng, Configuration& proposed) const override {
    (void)rng.next_double();
    proposed(0, 0) = 0.9;
    proposed(0, 1) = 0.9;
  }
  const char* name() const override { return "runaway"; }
};

}  // namespace

// --- classification ----------------------------------------------------------

TEST_CASE("terminal classification with default and custom thresholds") {
  CHECK(classify_terminal(0.995) == TerminalClass::kOptimal);
  CHECK(classify_terminal(0.99) == TerminalClass::kOptimal);   // inclusive at hi
  CHECK(classify_terminal(0.005) == TerminalClass::kNull);
  CHECK(classify_terminal(0.01) == TerminalClass::kNull);      // inclusive at lo
  CHECK(classify_terminal(0.5) == TerminalClass::kIndeterminate);

  CHECK(classify_terminal(0.85, 0.8, 0.2) == TerminalClass::kOptimal);
  CHECK(classify_terminal(0.5, 0.8, 0.2) == TerminalClass::kIndeterminate);
  CHECK(classify_terminal(0.1, 0.8, 0.2) == TerminalClass::kNull);
  CHECK_THROWS_AS(classify_terminal(0.5, 0.2, 0.8), ParamError);
  CHECK_THROWS_AS(classify_terminal(0.5, 0.5, 0.5), ParamError);

  CHECK(std::string(to_string(TerminalClass::kOptimal)) == "optimal");
  CHECK(std::string(to_string(TerminalClass::kNull)) == "null");
  CHECK(std::string(to_string(TerminalClass::kIndeterminate)) == "indeterminate");
}

TEST_CASE("Wilson score interval against frozen values") {
  const auto iv = wilson_interval(75, 100);
  CHECK(iv.lo == doctest::Approx(0.656955364519384).epsilon(1e-12));
  CHECK(iv.hi == doctest::Approx(0.8245478863771232).epsilon(1e-12));

  const auto none = wilson_interval(0, 10);
  CHECK(none.lo == 0.0);
  CHECK(none.hi > 0.0);
  const auto all = wilson_interval(10, 10);
  CHECK(all.hi == 1.0);
  CHECK(all.lo < 1.0);

  CHECK_THROWS_AS(wilson_interval(1, 0), ParamError);
  CHECK_THROWS_AS(wilson_interval(11, 10), ParamError);
  CHECK_THROWS_AS(wilson_interval(-1, 10), ParamError);
}

TEST_CASE("realized hazard series and the absorbed sentinel") {
  const std::vector<double> perf{0.5, 0.625};
  const auto h = hazard_rate_series(perf);
  REQUIRE(h.size() == 1);
  CHECK(h[0] == doctest::Approx(0.5).epsilon(1e-14));  // 0.125 / 0.25

  const auto longer = hazard_rate_series(std::vector<double>{0.5, 0.75, 1.0, 1.0});
  REQUIRE(longer.size() == 3);
  CHECK(longer[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(longer[1] == doctest::Approx(0.25 / (0.75 * 0.25)).epsilon(1e-14));
  CHECK(std::isnan(longer[2]));  // P(1-P) below the absorbed cutoff

  CHECK(hazard_rate_series(std::vector<double>{0.5}).empty());
  CHECK(hazard_rate_series(std::vector<double>{}).empty());
}

// --- Monte Carlo summaries ---------------------------------------------------

TEST_CASE("replication summary on the lock-in system matches its absorption law") {
  const System system = absorbing_system(0.5);
  RunPlan plan;
  plan.horizon = 2;
  plan.replications = 2000;
  plan.master_seed = 42;
  const auto summary = estimate_optimality(system, plan);

  CHECK(summary.replications == 2000);
  CHECK(summary.rep_seeds.size() == 2000);
  CHECK(summary.rep_seeds[0] == replication_seed(42, 0));
  CHECK(summary.rep_seeds[7] == replication_seed(42, 7));
  REQUIRE(summary.terminal_p.size() == 2000);
  CHECK(summary.count_indeterminate == 0);  // every path locks at the first step
  CHECK(summary.count_optimal + summary.count_null == 2000);

  // Lock-in probability (1 + 0.5)/2 = 0.75; allow 4 standard errors.
  const double freq =
      static_cast<double>(summary.count_optimal) / static_cast<double>(summary.replications);
  const double se = std::sqrt(0.75 * 0.25 / 2000.0);
  CHECK(std::abs(freq - 0.75) < 4.0 * se);
  CHECK(summary.mean_terminal == doctest::Approx(freq).epsilon(1e-12));
  CHECK(summary.optimal_interval.lo < freq);
  CHECK(summary.optimal_interval.hi > freq);
  CHECK(!summary.floor_checked);

  // Curve with stride 0 records exactly the endpoints.
  REQUIRE(summary.curve.size() == 2);
  CHECK(summary.curve.front().t == 0);
  CHECK(summary.curve.front().mean_p == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(summary.curve.back().t == 2);
  CHECK(std::isnan(summary.curve.back().mean_hazard));
}

TEST_CASE("drift test sees no falling interval on a converging system") {
  TwoArmedParams params;
  params.beta = 0.5;
  params.mu1 = 0.5;
  params.mu2 = 0.8;
  params.sigma0 = 0.5;
  const System system = automaton_system(params, /*harmonic=*/true);
  RunPlan plan;
  plan.horizon = 200;
  plan.replications = 512;
  plan.master_seed = 5;
  plan.curve_stride = 20;
  const auto summary = estimate_optimality(system, plan);
  REQUIRE(summary.curve.size() == 11);

  const auto drift = submartingale_diff_test(summary);
  CHECK(drift.intervals == 10);
  CHECK(drift.failures == 0);
}

TEST_CASE("the pathwise floor option refuses non-harmonic damping") {
  const System system = absorbing_system(0.5);
  RunPlan plan;
  plan.horizon = 2;
  plan.replications = 8;
  plan.floor_p0 = 0.5;
  CHECK_THROWS_AS(estimate_optimality(system, plan), ParamError);
}

TEST_CASE("simplex breaches inside replications surface as invariant errors") {
  System system;
  system.model = std::make_shared<RunawayModel>();
  system.optimal = OptimalSet::broadcast(1, 2, {0});
  RunPlan plan;
  plan.horizon = 3;
  plan.replications = 16;
  CHECK_THROWS_AS(estimate_optimality(system, plan), InvariantError);
}

// --- exact conditional checks ------------------------------------------------

TEST_CASE("expected-improvement enumeration is exactly tight for the canonical monotone rule") {
  const auto env =
      Environment::iid(kUnit, {bern(0.9), bern(0.5)});
  const auto model =
      std::make_shared<MonotoneModel>(MonotoneParams::canonical_family(1.0), env,
                                      std::vector<double>{0.5, 0.5});
  const OptimalSet optimal = optimal_set_expected(env);
  const auto delta = DeltaModel::monotone(1.0);

  const auto grid = config_grid(1, 2, 11);
  REQUIRE(grid.size() == 11);
  const auto states = states_at(grid, 0);
  const auto report = wberhr_check_exact(*model, optimal, env, delta, states);
  CHECK(report.all_hold);
  CHECK(report.failures == 0);
  CHECK(report.min_slack >= -1e-12);
  // For two actions the gain is exactly sigma0 sigma1 * 0.4, so the observed
  // hazard ratio sits on the closed-form floor at every interior state.
  CHECK(report.min_slack <= 1e-12);
  CHECK(report.tightest_ratio == doctest::Approx(0.4).epsilon(1e-12));
  REQUIRE(report.points.size() == 11);
  for (const auto& p : report.points) CHECK(p.holds);
}

TEST_CASE("exponential supermartingale check against a frozen lock-in oracle") {
  const auto model = std::make_shared<AbsorbingModel>(0.5);
  const OptimalSet optimal = OptimalSet::broadcast(1, 2, {0});
  std::vector<SystemState> states(1);
  states[0].config = model->initial_config();

  const auto report = supermartingale_check_exact(*model, optimal, 0.5, 1.0, states);
  CHECK(report.points == 1);
  CHECK(report.violations == 0);
  // lhs = 0.75 e^{-1/2} + 0.25, rhs = e^{-1/4}.
  CHECK(report.max_excess ==
        doctest::Approx(0.7048979947844751 - 0.7788007830714049).epsilon(1e-12));

  CHECK_THROWS_AS(supermartingale_check_exact(*model, optimal, 0.0, 1.0, states), ParamError);
  CHECK_THROWS_AS(supermartingale_check_exact(*model, optimal, 1.5, 1.0, states), ParamError);
  CHECK_THROWS_AS(supermartingale_check_exact(*model, optimal, 0.5, 0.0, states), ParamError);
  CHECK_THROWS_AS(supermartingale_check_exact(*model, optimal, 0.5, 1.5, states), ParamError);
}

TEST_CASE("supermartingale property holds across the state grid and hazard scales") {
  const auto model = std::make_shared<AbsorbingModel>(0.5);
  const OptimalSet optimal = OptimalSet::broadcast(1, 2, {0});
  const auto grid = config_grid(1, 2, 11);
  const auto states = states_at(grid, 0);
  for (double gamma : {0.1, 0.3, 0.5}) {
    const auto report = supermartingale_check_exact(*model, optimal, gamma, 1.0, states);
    CHECK(report.points == 11);
    CHECK(report.violations == 0);
    CHECK(report.max_excess <= 1e-12);
  }
}

TEST_CASE("Monte Carlo supermartingale drift stays within noise on the lock-in system") {
  const System system = absorbing_system(0.5);
  const auto report = supermartingale_check_mc(system, 0.5, 2, 500, 9);
  CHECK(report.points > 0);
  CHECK(report.violations == 0);
}

TEST_CASE("pathwise floor check on harmonically damped runs") {
  TwoArmedParams params;
  params.beta = 0.5;
  params.mu1 = 0.5;
  params.mu2 = 0.8;
  params.sigma0 = 0.5;
  const System damped = automaton_system(params, /*harmonic=*/true);
  const auto traj = run_trajectory(damped, 500, 3);
  const auto floor = pathwise_floor_check(traj);
  CHECK(floor.holds);
  CHECK(floor.first_violation == -1);
  CHECK(floor.min_margin >= 0.0);

  const System undamped = absorbing_system(0.5);
  const auto raw = run_trajectory(undamped, 2, 3);
  CHECK_THROWS_AS(pathwise_floor_check(raw), ParamError);
}

TEST_CASE("stopping-time probe finds the first commensurate step") {
  const std::vector<double> perf{0.1, 0.6, 0.7};
  const std::vector<double> thetas{0.5, 0.5, 0.5};
  const auto hit = rho_finiteness_probe(perf, thetas, 1.0);
  CHECK(hit.reached);
  CHECK(hit.hit_index == 1);

  const auto miss = rho_finiteness_probe(perf, thetas, 2.0);
  CHECK(!miss.reached);
  CHECK(miss.hit_index == -1);

  CHECK_THROWS_AS(rho_finiteness_probe(perf, std::vector<double>{0.5}, 1.0), ParamError);
}

// --- state grids -------------------------------------------------------------

TEST_CASE("simplex grids enumerate lattice mixtures") {
  const auto rows = simplex_grid(2, 11);
  REQUIRE(rows.size() == 11);
  for (const auto& row : rows) {
    CHECK(row[0] + row[1] == doctest::Approx(1.0).epsilon(1e-15));
  }
  bool found = false;
  for (const auto& row : rows) {
    if (std::abs(row[0] - 0.3) < 1e-15) found = true;
  }
  CHECK(found);

  CHECK(simplex_grid(3, 3).size() == 6);  // weak compositions of 2 into 3 parts
  CHECK_THROWS_AS(simplex_grid(1, 11), ParamError);
  CHECK_THROWS_AS(simplex_grid(2, 1), ParamError);
}

TEST_CASE("configuration grids are per-individual products with a guard") {
  const auto grid = config_grid(2, 2, 11);
  CHECK(grid.size() == 121);
  CHECK(grid.front().num_individuals() == 2);
  CHECK_THROWS_AS(config_grid(3, 2, 101, 1000), UnsupportedError);

  const auto states = states_at(std::span<const Configuration>(grid.data(), 3), 7);
  REQUIRE(states.size() == 3);
  CHECK(states[0].t == 7);
  CHECK(states[0].info.empty());
  CHECK(states[2].config.num_individuals() == 2);
}
