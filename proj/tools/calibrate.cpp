// Pilot runner for the release-gate thresholds.
//
// Three of the gate's criteria compare a Monte Carlo statistic against a
// pilot-calibrated threshold (pilot mean - 5 * pilot SD over 10 independent
// master seeds). This tool runs those pilots and prints the constants that
// are then frozen into tests/acceptance.cpp.
//
// Seed independence: replication r of master seed m draws from the stream
// seeded by mix(m XOR r), so any two masters in the same aligned 8192 block
// reuse nearly all of each other's streams (only the high bits differ under
// XOR with r < 8192). Pilot masters therefore sit at multiples of 8192 with
// block index >= 128: each pilot owns a private block of stream inputs, and
// every gate run (largest is 1e6 replications off master 97) keeps its
// inputs below 2^20 = 128 * 8192, so the calibration never touches a stream
// the gate will consume.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <thread>
#include <vector>

#include "hazard/automata.hpp"
#include "hazard/diagnostics.hpp"
#include "hazard/individual.hpp"
#include "hazard/schedule.hpp"
#include "hazard/social.hpp"

using namespace hazard;

namespace {

int default_workers() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

const PayoffSupport kUnit(0.0, 1.0);
PayoffDist bern(double p) { return PayoffDist({{0.0, 1.0 - p}, {1.0, p}}, kUnit); }

struct PilotStats {
  double mean = 0.0;
  double sd = 0.0;
  double threshold = 0.0;  // mean - 5 sd
};

PilotStats summarize(const std::vector<double>& values) {
  PilotStats s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
  s.threshold = s.mean - 5.0 * s.sd;
  return s;
}

// Harmonically damped two-armed automaton, the criterion-4 system.
System damped_automaton() {
  TwoArmedParams params;
  params.beta = 0.1;
  params.mu1 = 0.1;
  params.mu2 = 0.9;
  params.sigma0 = 0.5;
  System s;
  s.model = std::make_shared<TwoArmedAutomaton>(params);
  s.optimal = TwoArmedAutomaton::optimal_set();
  s.slowing = SlowingSchedule::harmonic();
  return s;
}

// Proportional pair imitation in a 5-individual population, criterion 9.
System social_population() {
  const auto env =
      Environment::iid(kUnit, {bern(0.9), bern(0.4)}, 5);
  std::vector<double> flat(10, 0.5);
  System s;
  s.model = std::make_shared<SocialModel>(env, ImitationComponent::proportional(),
                                          SamplingProcess::uniform_pairs(5),
                                          ImitationRate::harmonic(),
                                          Configuration(5, 2, flat));
  s.optimal = optimal_set_expected(env);
  return s;
}

std::uint64_t pilot_master(std::uint64_t first_block, int k) {
  return (first_block + static_cast<std::uint64_t>(k)) * 8192;
}

void pilot_mean_terminal(const char* label, const System& system, long long horizon,
                         long long replications, std::uint64_t first_block, double floor_p0) {
  std::vector<double> means;
  for (int k = 0; k < 10; ++k) {
    RunPlan plan;
    plan.horizon = horizon;
    plan.replications = replications;
    plan.master_seed = pilot_master(first_block, k);
    plan.workers = default_workers();
    plan.floor_p0 = floor_p0;
    const auto t0 = std::chrono::steady_clock::now();
    const auto summary = estimate_optimality(system, plan);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    means.push_back(summary.mean_terminal);
    std::printf("  seed %llu: mean terminal P = %.6f  (null %lld, indet %lld, %.1fs)\n",
                static_cast<unsigned long long>(plan.master_seed), summary.mean_terminal,
                summary.count_null, summary.count_indeterminate, secs);
  }
  const auto stats = summarize(means);
  std::printf("%s: pilot mean %.6f, sd %.6f -> threshold %.6f\n\n", label, stats.mean, stats.sd,
              stats.threshold);
}

// Criterion-8 pilot: fraction of reinforcement runs whose optimal-action
// attraction exceeds 0.45 * T at the horizon.
void pilot_attraction_fraction(std::uint64_t first_block) {
  const auto env = Environment::iid(kUnit, {bern(0.9), bern(0.4)});
  System system;
  system.model = std::make_shared<RothErevModel>(env, std::vector<double>{5.5, 5.5});
  system.optimal = optimal_set_expected(env);
  const long long horizon = 100000;
  const long long replications = 200;
  const double needed = 0.5 * 0.9 * static_cast<double>(horizon);

  double min_fraction = 1.0;
  for (int k = 0; k < 10; ++k) {
    const std::uint64_t master = pilot_master(first_block, k);
    long long hits = 0;
    for (long long r = 0; r < replications; ++r) {
      const auto traj = run_trajectory(system, horizon, replication_seed(master, r));
      if (traj.final_info[0] > needed) ++hits;
    }
    const double fraction =
        static_cast<double>(hits) / static_cast<double>(replications);
    min_fraction = std::min(min_fraction, fraction);
    std::printf("  seed %llu: attraction fraction %.4f\n",
                static_cast<unsigned long long>(master), fraction);
  }
  std::printf("attraction-divergence: min pilot fraction %.4f (gate requires >= 0.95)\n\n",
              min_fraction);
}

}  // namespace

int main() {
  std::printf("criterion 4 pilot (damped automaton, T=1e5, R=1e3):\n");
  pilot_mean_terminal("criterion 4", damped_automaton(), 100000, 1000, /*blocks*/ 128, 0.5);

  std::printf("criterion 8 pilot (reinforcement attraction divergence, T=1e5, R=200):\n");
  pilot_attraction_fraction(/*blocks*/ 144);

  std::printf("criterion 9 pilot (social population, T=1e5, R=500):\n");
  pilot_mean_terminal("criterion 9", social_population(), 100000, 500, /*blocks*/ 160, -1.0);
  return 0;
}
