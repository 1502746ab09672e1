#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hazard/batch.hpp"
#include "hazard/environment.hpp"
#include "hazard/system.hpp"

namespace hazard {

// --- Terminal classification ------------------------------------------------

enum class TerminalClass { kOptimal, kNull, kIndeterminate };
inline constexpr double kOptimalThreshold = 0.99;
inline constexpr double kNullThreshold = 0.01;

// Thresholds are configurable but must satisfy lo < hi.
TerminalClass classify_terminal(double performance, double hi, double lo);
inline TerminalClass classify_terminal(double performance) {
  return classify_terminal(performance, kOptimalThreshold, kNullThreshold);
}
const char* to_string(TerminalClass c);

// 95% Wilson score interval (z = 1.959963984540054).
struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};
Interval wilson_interval(long long successes, long long trials);

// Realized per-step relative gains along one performance path:
//   h_t = (P_{t+1} - P_t) / (P_t (1 - P_t)),
// NaN where the denominator is below 1e-15 (absorbed endpoint). Length is
// performance.size() - 1.
std::vector<double> hazard_rate_series(std::span<const double> performance);

// --- Monte Carlo estimation -------------------------------------------------

struct RunPlan {
  long long horizon = 0;
  long long replications = 0;
  std::uint64_t master_seed = 1;
  int workers = 1;
  // Curve sampling stride; 0 records only t = 0 and t = horizon.
  long long curve_stride = 0;
  // >= 0 enables the exact pathwise check P_t >= floor_p0/(t+1); requires a
  // harmonic damping schedule (the regime the floor statement covers).
  double floor_p0 = -1.0;
  batch::Kernel kernel = batch::Kernel::kAuto;
  // Skip the lockstep fast path even when the model has one (equivalence
  // tests exercise both paths on the same inputs).
  bool force_generic = false;
  // Classification thresholds (lo < hi).
  double class_hi = kOptimalThreshold;
  double class_lo = kNullThreshold;
};

struct CurvePoint {
  long long t = 0;
  double mean_p = 0.0;
  double se_p = 0.0;
  // Mean one-step relative gain taken at this curve point, over the
  // replications not yet absorbed there; NaN at the final point.
  double mean_hazard = 0.0;
  long long hazard_lanes = 0;
  // Performance change over the interval ending at this curve point
  // (NaN at the first point).
  double mean_dp = 0.0;
  double sd_dp = 0.0;
};

struct ReplicationSummary {
  long long horizon = 0;
  long long replications = 0;
  std::uint64_t master_seed = 0;

  std::vector<std::uint64_t> rep_seeds;
  std::vector<double> terminal_p;

  long long count_optimal = 0;
  long long count_null = 0;
  long long count_indeterminate = 0;
  Interval optimal_interval;  // Wilson 95% for count_optimal / replications
  double mean_terminal = 0.0;
  double se_terminal = 0.0;

  std::vector<CurvePoint> curve;

  bool floor_checked = false;
  long long floor_violations = 0;
  std::vector<std::uint8_t> floor_violated;  // per replication, when checked
};

// Run `replications` independent trajectories (replication r is seeded with
// splitmix64_mix(master_seed ^ r)) and summarize. Deterministic: results are
// identical for any worker count, and for the two scalar-state systems
// identical across the scalar and AVX2 kernels and the generic engine.
// Work is split into fixed 256-replication tasks merged in index order.
ReplicationSummary estimate_optimality(const System& system, const RunPlan& plan);

// Dispersion-based drift test on the curve's interval changes: flags an
// interval when its mean change is below -3 standard errors (or below zero
// exactly, if the change is deterministic). A clean pass is what "expected
// performance never falls" looks like at Monte Carlo resolution.
struct DriftReport {
  long long intervals = 0;
  long long failures = 0;
  double min_t_stat = 0.0;
};
DriftReport submartingale_diff_test(const ReplicationSummary& summary);

// --- Exact conditional checks -----------------------------------------------

// Exact expected-improvement check at a set of states, by outcome
// enumeration: gain(state) >= delta(t) * P(1-P) - 1e-12, with gain the
// one-step expected performance change of the raw (undamped) rule and delta
// the model's closed-form hazard floor.
struct WberhrPoint {
  double performance = 0.0;
  double gain = 0.0;
  double delta = 0.0;
  double bound = 0.0;
  double slack = 0.0;  // gain - bound
  bool holds = false;
};

struct WberhrReport {
  std::vector<WberhrPoint> points;
  long long failures = 0;
  double min_slack = 0.0;
  // Smallest observed gain/(P(1-P)) over states with P(1-P) >= 1e-15: the
  // tightest hazard rate the enumeration actually exhibits (NaN if none).
  double tightest_ratio = 0.0;
  bool all_hold = false;
};

WberhrReport wberhr_check_exact(const Model& model, const OptimalSet& optimal,
                                const Environment& env, const DeltaModel& delta_model,
                                std::span<const SystemState> states);

// Exact one-step supermartingale check for Y = exp(-(gamma/theta) P) under
// the theta-damped step P' = P + theta*(A(outcome) - P):
//   sum_o p_o exp(-(gamma/theta) P'_o) <= exp(-(gamma/theta) P) + 1e-12.
// The MC variant estimates the mean one-step drift of Y along simulated
// trajectories and flags a violation beyond +3 standard errors.
struct SupermartingaleReport {
  long long points = 0;
  long long violations = 0;
  double max_excess = 0.0;  // exact mode: worst lhs - rhs
  double mean_drift = 0.0;  // mc mode
  double se_drift = 0.0;    // mc mode
};

SupermartingaleReport supermartingale_check_exact(const Model& model, const OptimalSet& optimal,
                                                  double gamma, double theta,
                                                  std::span<const SystemState> states);
SupermartingaleReport supermartingale_check_mc(const System& system, double gamma,
                                               long long horizon, long long replications,
                                               std::uint64_t master_seed);

// Exact pathwise floor P_t >= P_0/(t+1) for a harmonically damped run
// (throws ParamError when the trajectory used any other schedule).
struct FloorReport {
  bool holds = true;
  long long first_violation = -1;
  double min_margin = 0.0;  // min over t of P_t - P_0/(t+1)
};
FloorReport pathwise_floor_check(const Trajectory& trajectory);

// Stopping-time probe: the first recorded index t with P_t >= y * theta_t,
// or not reached within the horizon. A finite hit on every replication is
// the observable signature that the slowdown stays commensurate with the
// progress already made.
struct RhoProbe {
  bool reached = false;
  long long hit_index = -1;
};
RhoProbe rho_finiteness_probe(std::span<const double> performance,
                              std::span<const double> thetas, double y);

// --- State grids ------------------------------------------------------------

// All rows (k_1,...,k_A)/(points_per_axis-1) on the simplex; for two actions
// and 11 points per axis this is {0, 0.1, ..., 1}.
std::vector<std::vector<double>> simplex_grid(int num_actions, int points_per_axis);

// Product of per-individual simplex grids, guarded by max_count.
std::vector<Configuration> config_grid(int num_individuals, int num_actions, int points_per_axis,
                                       std::size_t max_count = 200000);

// States at a fixed time with empty info payloads, one per configuration.
std::vector<SystemState> states_at(std::span<const Configuration> configs, long long t);

}  // namespace hazard
