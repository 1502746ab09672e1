#include "hazard/diagnostics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

namespace hazard {
namespace {

constexpr long long kTaskReps = 256;  // fixed so results ignore worker count
constexpr double kZ95 = 1.959963984540054;
constexpr double kAbsorbedDenom = 1e-15;

double quiet_nan() { return std::numeric_limits<double>::quiet_NaN(); }

inline double hsum4(const double v[4]) { return (v[0] + v[2]) + (v[1] + v[3]); }

double sample_sd(double sum, double sum_sq, long long n) {
  if (n < 2) return 0.0;
  const double var = (sum_sq - sum * sum / static_cast<double>(n)) / static_cast<double>(n - 1);
  return var > 0.0 ? std::sqrt(var) : 0.0;
}

}  // namespace

// --- Classification and intervals -------------------------------------------

TerminalClass classify_terminal(double performance, double hi, double lo) {
  if (!(lo < hi)) throw ParamError("classification thresholds need lo < hi");
  if (performance >= hi) return TerminalClass::kOptimal;
  if (performance <= lo) return TerminalClass::kNull;
  return TerminalClass::kIndeterminate;
}

const char* to_string(TerminalClass c) {
  switch (c) {
    case TerminalClass::kOptimal: return "optimal";
    case TerminalClass::kNull: return "null";
    case TerminalClass::kIndeterminate: return "indeterminate";
  }
  return "?";
}

Interval wilson_interval(long long successes, long long trials) {
  if (trials < 1) throw ParamError("interval needs at least one trial");
  if (successes < 0 || successes > trials) throw ParamError("successes out of range");
  const double n = static_cast<double>(trials);
  const double s = static_cast<double>(successes);
  const double z2 = kZ95 * kZ95;
  const double denom = n + z2;
  const double center = (s + z2 / 2.0) / denom;
  const double half = kZ95 * std::sqrt(s * (n - s) / n + z2 / 4.0) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

std::vector<double> hazard_rate_series(std::span<const double> performance) {
  if (performance.size() < 2) return {};
  std::vector<double> out(performance.size() - 1);
  for (std::size_t t = 0; t + 1 < performance.size(); ++t) {
    const double p = performance[t];
    const double denom = p * (1.0 - p);
    out[t] = denom >= kAbsorbedDenom ? (performance[t + 1] - p) / denom : quiet_nan();
  }
  return out;
}

// --- Monte Carlo estimation -------------------------------------------------

namespace {

// Generic engine path for one task range, accumulating with the same 4-lane
// layout and reduction tree as the lockstep kernels so that sums agree bit
// for bit wherever both paths apply.
void run_generic_range(const System& system, const std::vector<long long>& ts,
                       std::span<const std::uint64_t> seeds, double floor_p0,
                       std::span<double> terminal_slice, std::span<std::uint8_t> floor_slice,
                       batch::BatchAccum& accum) {
  const long long horizon = ts.back();
  const std::size_t n_pts = ts.size();
  const bool check_floor = floor_p0 >= 0.0;

  std::vector<double> pv(n_pts * 4);
  std::vector<double> hv(n_pts * 4);
  std::vector<std::uint8_t> hok(n_pts * 4);

  for (std::size_t base = 0; base < seeds.size(); base += 4) {
    const int active = static_cast<int>(std::min<std::size_t>(4, seeds.size() - base));
    std::fill(pv.begin(), pv.end(), 0.0);
    std::fill(hv.begin(), hv.end(), 0.0);
    std::fill(hok.begin(), hok.end(), 0);

    for (int l = 0; l < active; ++l) {
      const Trajectory traj = run_trajectory(system, horizon, seeds[base + l]);
      const auto& perf = traj.performance;
      for (std::size_t k = 0; k < n_pts; ++k) {
        const double p = perf[static_cast<std::size_t>(ts[k])];
        pv[k * 4 + l] = p;
        if (ts[k] < horizon) {
          const double denom = p * (1.0 - p);
          if (denom >= kAbsorbedDenom) {
            hv[k * 4 + l] = (perf[static_cast<std::size_t>(ts[k]) + 1] - p) / denom;
            hok[k * 4 + l] = 1;
          }
        }
      }
      terminal_slice[base + l] = perf[static_cast<std::size_t>(horizon)];
      if (check_floor) {
        bool violated = false;
        for (long long t = 1; t <= horizon; ++t) {
          if (perf[static_cast<std::size_t>(t)] < floor_p0 / static_cast<double>(t + 1)) {
            violated = true;
            break;
          }
        }
        floor_slice[base + l] = violated ? 1 : 0;
      }
    }

    for (std::size_t k = 0; k < n_pts; ++k) {
      double v[4], v2[4];
      for (int l = 0; l < 4; ++l) {
        v[l] = pv[k * 4 + l];
        v2[l] = v[l] * v[l];
      }
      accum.sum_p[k] += hsum4(v);
      accum.sum_p2[k] += hsum4(v2);
      if (k >= 1) {
        double d[4], d2[4];
        for (int l = 0; l < 4; ++l) {
          d[l] = l < active ? pv[k * 4 + l] - pv[(k - 1) * 4 + l] : 0.0;
          d2[l] = d[l] * d[l];
        }
        accum.sum_dp[k - 1] += hsum4(d);
        accum.sum_dp2[k - 1] += hsum4(d2);
      }
      if (ts[k] < horizon) {
        double h[4];
        int cnt = 0;
        for (int l = 0; l < 4; ++l) {
          h[l] = hv[k * 4 + l];
          cnt += hok[k * 4 + l];
        }
        accum.sum_hazard[k] += hsum4(h);
        accum.n_hazard[k] += cnt;
      }
    }
  }
}

bool optimal_is(const OptimalSet& optimal, int action) {
  return optimal.num_individuals() == 1 && optimal.of(0).size() == 1 &&
         optimal.of(0)[0] == action;
}

}  // namespace

ReplicationSummary estimate_optimality(const System& system, const RunPlan& plan) {
  if (system.model == nullptr) throw ParamError("plan needs a model");
  if (plan.horizon < 1) throw ParamError("plan needs horizon >= 1");
  if (plan.replications < 1) throw ParamError("plan needs replications >= 1");
  if (plan.workers < 1) throw ParamError("plan needs workers >= 1");
  if (plan.curve_stride < 0) throw ParamError("curve stride must be nonnegative");
  const long long stride = plan.curve_stride > 0 ? plan.curve_stride : plan.horizon;
  const auto ts = batch::curve_points(plan.horizon, stride);
  const bool check_floor = plan.floor_p0 >= 0.0;
  if (check_floor &&
      (!system.slowing || system.slowing->kind != SlowingSchedule::Kind::kHarmonic)) {
    throw ParamError("the pathwise floor check applies to harmonically damped runs");
  }

  const long long R = plan.replications;
  std::vector<std::uint64_t> seeds(static_cast<std::size_t>(R));
  for (long long r = 0; r < R; ++r) {
    seeds[static_cast<std::size_t>(r)] =
        replication_seed(plan.master_seed, static_cast<std::uint64_t>(r));
  }

  std::vector<double> thetas;
  if (system.slowing) {
    thetas.resize(static_cast<std::size_t>(plan.horizon));
    for (long long t = 0; t < plan.horizon; ++t) {
      thetas[static_cast<std::size_t>(t)] = system.theta_at(t);
    }
  }

  // Lockstep fast path for the two scalar-state systems (with their
  // canonical optimal sets; anything else takes the generic engine).
  batch::BatchSpec spec;
  bool use_batch = false;
  if (!plan.force_generic) {
    if (const auto* m = dynamic_cast<const AbsorbingModel*>(system.model.get());
        m != nullptr && optimal_is(system.optimal, 0)) {
      spec.model = batch::BatchSpec::Model::kAbsorbing;
      spec.sigma0 = m->sigma0();
      use_batch = true;
    } else if (const auto* a = dynamic_cast<const TwoArmedAutomaton*>(system.model.get());
               a != nullptr && optimal_is(system.optimal, 1)) {
      spec.model = batch::BatchSpec::Model::kAutomaton;
      spec.automaton = a->params();
      use_batch = true;
    }
    if (use_batch) {
      spec.horizon = plan.horizon;
      spec.theta = thetas.empty() ? nullptr : thetas.data();
      spec.stride = stride;
      spec.floor_p0 = plan.floor_p0;
    }
  }

  const long long n_tasks = (R + kTaskReps - 1) / kTaskReps;
  std::vector<double> terminal(static_cast<std::size_t>(R));
  std::vector<std::uint8_t> floor_flags(check_floor ? static_cast<std::size_t>(R) : 0);
  std::vector<batch::BatchAccum> accums(static_cast<std::size_t>(n_tasks));
  std::vector<batch::BatchBreach> breaches(static_cast<std::size_t>(n_tasks));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n_tasks));

  std::atomic<long long> next{0};
  auto work = [&]() {
    long long task;
    while ((task = next.fetch_add(1)) < n_tasks) {
      const long long begin = task * kTaskReps;
      const long long count = std::min(R - begin, kTaskReps);
      auto& accum = accums[static_cast<std::size_t>(task)];
      accum.init(ts);
      const auto seed_slice = std::span<const std::uint64_t>(seeds).subspan(
          static_cast<std::size_t>(begin), static_cast<std::size_t>(count));
      const auto term_slice = std::span<double>(terminal).subspan(
          static_cast<std::size_t>(begin), static_cast<std::size_t>(count));
      const auto floor_slice =
          check_floor ? std::span<std::uint8_t>(floor_flags)
                            .subspan(static_cast<std::size_t>(begin), static_cast<std::size_t>(count))
                      : std::span<std::uint8_t>{};
      try {
        if (use_batch) {
          batch::run_batch(spec, seed_slice, term_slice, floor_slice, accum,
                           breaches[static_cast<std::size_t>(task)], plan.kernel);
        } else {
          run_generic_range(system, ts, seed_slice, plan.floor_p0, term_slice, floor_slice, accum);
        }
      } catch (...) {
        errors[static_cast<std::size_t>(task)] = std::current_exception();
      }
    }
  };

  const int n_workers = static_cast<int>(std::min<long long>(plan.workers, n_tasks));
  if (n_workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_workers));
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }

  // Deterministic error selection: first failing task in index order wins.
  for (long long task = 0; task < n_tasks; ++task) {
    if (errors[static_cast<std::size_t>(task)]) {
      std::rethrow_exception(errors[static_cast<std::size_t>(task)]);
    }
    const auto& breach = breaches[static_cast<std::size_t>(task)];
    if (breach.hit) {
      const std::size_t rep = static_cast<std::size_t>(task * kTaskReps + breach.lane);
      throw InvariantError("configuration left the simplex beyond 1e-12", breach.step, seeds[rep]);
    }
  }

  batch::BatchAccum total;
  total.init(ts);
  for (long long task = 0; task < n_tasks; ++task) {
    total.merge(accums[static_cast<std::size_t>(task)]);
  }

  ReplicationSummary out;
  out.horizon = plan.horizon;
  out.replications = R;
  out.master_seed = plan.master_seed;
  out.rep_seeds = std::move(seeds);
  out.terminal_p = std::move(terminal);
  for (double p : out.terminal_p) {
    switch (classify_terminal(p, plan.class_hi, plan.class_lo)) {
      case TerminalClass::kOptimal: ++out.count_optimal; break;
      case TerminalClass::kNull: ++out.count_null; break;
      case TerminalClass::kIndeterminate: ++out.count_indeterminate; break;
    }
  }
  out.optimal_interval = wilson_interval(out.count_optimal, R);

  const double n = static_cast<double>(R);
  out.curve.resize(ts.size());
  for (std::size_t k = 0; k < ts.size(); ++k) {
    CurvePoint& pt = out.curve[k];
    pt.t = ts[k];
    pt.mean_p = total.sum_p[k] / n;
    pt.se_p = sample_sd(total.sum_p[k], total.sum_p2[k], R) / std::sqrt(n);
    if (total.n_hazard[k] > 0) {
      pt.mean_hazard = total.sum_hazard[k] / static_cast<double>(total.n_hazard[k]);
      pt.hazard_lanes = total.n_hazard[k];
    } else {
      pt.mean_hazard = quiet_nan();
      pt.hazard_lanes = 0;
    }
    if (k >= 1) {
      pt.mean_dp = total.sum_dp[k - 1] / n;
      pt.sd_dp = sample_sd(total.sum_dp[k - 1], total.sum_dp2[k - 1], R);
    } else {
      pt.mean_dp = quiet_nan();
      pt.sd_dp = quiet_nan();
    }
  }
  out.mean_terminal = out.curve.back().mean_p;
  out.se_terminal = out.curve.back().se_p;

  out.floor_checked = check_floor;
  if (check_floor) {
    out.floor_violated = std::move(floor_flags);
    for (std::uint8_t f : out.floor_violated) out.floor_violations += f;
  }
  return out;
}

DriftReport submartingale_diff_test(const ReplicationSummary& summary) {
  DriftReport rep;
  rep.min_t_stat = std::numeric_limits<double>::infinity();
  const double sqrt_n = std::sqrt(static_cast<double>(summary.replications));
  for (std::size_t k = 1; k < summary.curve.size(); ++k) {
    ++rep.intervals;
    const double mean = summary.curve[k].mean_dp;
    const double sd = summary.curve[k].sd_dp;
    if (sd > 0.0) {
      const double t_stat = mean / (sd / sqrt_n);
      rep.min_t_stat = std::min(rep.min_t_stat, t_stat);
      if (t_stat < -3.0) ++rep.failures;
    } else if (mean < 0.0) {
      // Deterministic decrease: a failure no dispersion can excuse.
      rep.min_t_stat = -std::numeric_limits<double>::infinity();
      ++rep.failures;
    }
  }
  if (rep.intervals == 0) rep.min_t_stat = 0.0;
  return rep;
}

// --- Exact conditional checks -----------------------------------------------

WberhrReport wberhr_check_exact(const Model& model, const OptimalSet& optimal,
                                const Environment& env, const DeltaModel& delta_model,
                                std::span<const SystemState> states) {
  WberhrReport rep;
  rep.min_slack = std::numeric_limits<double>::infinity();
  double tight = std::numeric_limits<double>::infinity();
  bool any_ratio = false;
  for (const auto& state : states) {
    WberhrPoint pt;
    pt.performance = aggregate(state.config, optimal);
    double expected = 0.0;
    for (const auto& o : model.enumerate_outcomes(state)) {
      expected += o.prob * aggregate(o.proposed, optimal);
    }
    pt.gain = expected - pt.performance;
    pt.delta = delta_lower_bound(env, delta_model, state.t);
    const double denom = pt.performance * (1.0 - pt.performance);
    pt.bound = pt.delta * denom;
    pt.slack = pt.gain - pt.bound;
    pt.holds = pt.slack >= -1e-12;
    if (!pt.holds) ++rep.failures;
    rep.min_slack = std::min(rep.min_slack, pt.slack);
    if (denom >= kAbsorbedDenom) {
      tight = std::min(tight, pt.gain / denom);
      any_ratio = true;
    }
    rep.points.push_back(pt);
  }
  if (states.empty()) rep.min_slack = 0.0;
  rep.tightest_ratio = any_ratio ? tight : quiet_nan();
  rep.all_hold = rep.failures == 0;
  return rep;
}

SupermartingaleReport supermartingale_check_exact(const Model& model, const OptimalSet& optimal,
                                                  double gamma, double theta,
                                                  std::span<const SystemState> states) {
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    throw ParamError("supermartingale check needs gamma in (0,1]");
  }
  if (!(theta > 0.0 && theta <= 1.0)) throw ParamError("damping factor must lie in (0,1]");
  SupermartingaleReport rep;
  rep.max_excess = -std::numeric_limits<double>::infinity();
  const double rate = gamma / theta;
  for (const auto& state : states) {
    ++rep.points;
    const double p = aggregate(state.config, optimal);
    const double rhs = std::exp(-rate * p);
    double lhs = 0.0;
    for (const auto& o : model.enumerate_outcomes(state)) {
      const double next = p + theta * (aggregate(o.proposed, optimal) - p);
      lhs += o.prob * std::exp(-rate * next);
    }
    const double excess = lhs - rhs;
    rep.max_excess = std::max(rep.max_excess, excess);
    if (excess > 1e-12) ++rep.violations;
  }
  if (rep.points == 0) rep.max_excess = 0.0;
  return rep;
}

SupermartingaleReport supermartingale_check_mc(const System& system, double gamma,
                                               long long horizon, long long replications,
                                               std::uint64_t master_seed) {
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    throw ParamError("supermartingale check needs gamma in (0,1]");
  }
  if (horizon < 1 || replications < 1) throw ParamError("need horizon and replications >= 1");
  double theta = 1.0;
  if (system.slowing) {
    if (system.slowing->kind != SlowingSchedule::Kind::kConstant) {
      throw ParamError("the mc supermartingale check needs a constant damping factor");
    }
    theta = system.slowing->theta;
  }
  const double rate = gamma / theta;

  SupermartingaleReport rep;
  double sum = 0.0, sum_sq = 0.0;
  for (long long r = 0; r < replications; ++r) {
    const Trajectory traj =
        run_trajectory(system, horizon, replication_seed(master_seed, static_cast<std::uint64_t>(r)));
    for (long long t = 0; t < horizon; ++t) {
      const double d = std::exp(-rate * traj.performance[static_cast<std::size_t>(t + 1)]) -
                       std::exp(-rate * traj.performance[static_cast<std::size_t>(t)]);
      sum += d;
      sum_sq += d * d;
      ++rep.points;
    }
  }
  rep.mean_drift = sum / static_cast<double>(rep.points);
  rep.se_drift = sample_sd(sum, sum_sq, rep.points) / std::sqrt(static_cast<double>(rep.points));
  rep.violations = rep.mean_drift > 3.0 * rep.se_drift ? 1 : 0;
  return rep;
}

FloorReport pathwise_floor_check(const Trajectory& trajectory) {
  if (!trajectory.schedule_kind ||
      *trajectory.schedule_kind != SlowingSchedule::Kind::kHarmonic) {
    throw ParamError("the pathwise floor applies to harmonically damped trajectories");
  }
  FloorReport rep;
  rep.min_margin = std::numeric_limits<double>::infinity();
  const double p0 = trajectory.performance.empty() ? 0.0 : trajectory.performance[0];
  for (std::size_t t = 0; t < trajectory.performance.size(); ++t) {
    const double floor = p0 / static_cast<double>(t + 1);
    const double margin = trajectory.performance[t] - floor;
    rep.min_margin = std::min(rep.min_margin, margin);
    if (trajectory.performance[t] < floor && rep.holds) {
      rep.holds = false;
      rep.first_violation = static_cast<long long>(t);
    }
  }
  if (trajectory.performance.empty()) rep.min_margin = 0.0;
  return rep;
}

RhoProbe rho_finiteness_probe(std::span<const double> performance,
                              std::span<const double> thetas, double y) {
  if (!(y > 0.0)) throw ParamError("probe threshold must be positive");
  if (performance.size() != thetas.size()) {
    throw ParamError("probe needs matching performance and damping-factor series");
  }
  RhoProbe probe;
  for (std::size_t t = 0; t < performance.size(); ++t) {
    if (performance[t] >= y * thetas[t]) {
      probe.reached = true;
      probe.hit_index = static_cast<long long>(t);
      return probe;
    }
  }
  return probe;
}

// --- State grids ------------------------------------------------------------

std::vector<std::vector<double>> simplex_grid(int num_actions, int points_per_axis) {
  if (num_actions < 2) throw ParamError("grid needs at least 2 actions");
  if (points_per_axis < 2) throw ParamError("grid needs at least 2 points per axis");
  const int n = points_per_axis - 1;
  std::vector<std::vector<double>> rows;
  std::vector<int> counts(static_cast<std::size_t>(num_actions), 0);
  // Compositions of n into num_actions parts, first coordinate slowest.
  auto emit = [&](auto&& self, int coord, int remaining) -> void {
    if (coord == num_actions - 1) {
      counts[static_cast<std::size_t>(coord)] = remaining;
      std::vector<double> row(static_cast<std::size_t>(num_actions));
      for (int a = 0; a < num_actions; ++a) {
        row[static_cast<std::size_t>(a)] =
            static_cast<double>(counts[static_cast<std::size_t>(a)]) / static_cast<double>(n);
      }
      rows.push_back(std::move(row));
      return;
    }
    for (int k = 0; k <= remaining; ++k) {
      counts[static_cast<std::size_t>(coord)] = k;
      self(self, coord + 1, remaining - k);
    }
  };
  emit(emit, 0, n);
  if (rows.size() > 1000000) throw UnsupportedError("state grid too large");
  return rows;
}

std::vector<Configuration> config_grid(int num_individuals, int num_actions, int points_per_axis,
                                       std::size_t max_count) {
  if (num_individuals < 1) throw ParamError("grid needs at least 1 individual");
  const auto rows = simplex_grid(num_actions, points_per_axis);
  double count = 1.0;
  for (int i = 0; i < num_individuals; ++i) {
    count *= static_cast<double>(rows.size());
    if (count > static_cast<double>(max_count)) {
      throw UnsupportedError("state grid too large for this population size");
    }
  }
  std::vector<Configuration> out;
  out.reserve(static_cast<std::size_t>(count));
  std::vector<std::size_t> idx(static_cast<std::size_t>(num_individuals), 0);
  while (true) {
    std::vector<double> flat;
    flat.reserve(static_cast<std::size_t>(num_individuals) * num_actions);
    for (int i = 0; i < num_individuals; ++i) {
      const auto& row = rows[idx[static_cast<std::size_t>(i)]];
      flat.insert(flat.end(), row.begin(), row.end());
    }
    out.emplace_back(num_individuals, num_actions, std::move(flat));
    int d = num_individuals - 1;
    while (d >= 0 && ++idx[static_cast<std::size_t>(d)] == rows.size()) {
      idx[static_cast<std::size_t>(d--)] = 0;
    }
    if (d < 0) break;
  }
  return out;
}

std::vector<SystemState> states_at(std::span<const Configuration> configs, long long t) {
  std::vector<SystemState> out;
  out.reserve(configs.size());
  for (const auto& config : configs) {
    SystemState st;
    st.t = t;
    st.config = config;
    out.push_back(std::move(st));
  }
  return out;
}

}  // namespace hazard
