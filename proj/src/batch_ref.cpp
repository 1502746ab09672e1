#include <cmath>

#include "hazard/batch.hpp"

namespace hazard {
namespace batch {

std::vector<long long> curve_points(long long horizon, long long stride) {
  if (horizon < 0) throw ParamError("curve_points: horizon must be nonnegative");
  if (stride < 1) throw ParamError("curve_points: stride must be positive");
  std::vector<long long> ts;
  for (long long t = 0; t < horizon; t += stride) ts.push_back(t);
  ts.push_back(horizon);
  return ts;
}

void BatchAccum::init(const std::vector<long long>& points) {
  ts = points;
  const std::size_t n = ts.size();
  sum_p.assign(n, 0.0);
  sum_p2.assign(n, 0.0);
  sum_hazard.assign(n, 0.0);
  n_hazard.assign(n, 0);
  sum_dp.assign(n > 0 ? n - 1 : 0, 0.0);
  sum_dp2.assign(n > 0 ? n - 1 : 0, 0.0);
}

void BatchAccum::merge(const BatchAccum& other) {
  if (ts != other.ts) throw ConfigError("curve accumulators have mismatched points");
  for (std::size_t k = 0; k < sum_p.size(); ++k) {
    sum_p[k] += other.sum_p[k];
    sum_p2[k] += other.sum_p2[k];
    sum_hazard[k] += other.sum_hazard[k];
    n_hazard[k] += other.n_hazard[k];
  }
  for (std::size_t k = 0; k < sum_dp.size(); ++k) {
    sum_dp[k] += other.sum_dp[k];
    sum_dp2[k] += other.sum_dp2[k];
  }
}

namespace {

constexpr int kLanes = 4;

// Mirror of normalize_row for a two-entry row; returns false on breach.
inline bool normalize2(double& c0, double& c1) {
  if (!(c0 >= -kSimplexTol) || !(c1 >= -kSimplexTol)) return false;
  c0 = (c0 <= 0.0) ? 0.0 : c0;
  c1 = (c1 <= 0.0) ? 0.0 : c1;
  const double sum = c0 + c1;
  double off = sum - 1.0;
  if (off < 0.0) off = -off;
  if (!(off <= kSimplexTol)) return false;
  c0 /= sum;
  c1 /= sum;
  return true;
}

// Fixed four-lane reduction tree; the AVX2 horizontal add produces exactly
// this association.
inline double hsum4(const double v[kLanes]) { return (v[0] + v[2]) + (v[1] + v[3]); }

}  // namespace

void run_batch_scalar(const BatchSpec& spec, std::span<const std::uint64_t> seeds,
                      std::span<double> terminal_p, std::span<std::uint8_t> floor_violated,
                      BatchAccum& accum, BatchBreach& breach) {
  const bool is_automaton = spec.model == BatchSpec::Model::kAutomaton;
  if (is_automaton) spec.automaton.validate();
  const double beta = spec.automaton.beta;
  const double mu1 = spec.automaton.mu1;
  const double mu2 = spec.automaton.mu2;
  const bool check_floor = spec.floor_p0 >= 0.0;
  if (terminal_p.size() != seeds.size())
    throw ConfigError("batch: terminal_p size must match seeds");
  if (check_floor && floor_violated.size() != seeds.size())
    throw ConfigError("batch: floor_violated size must match seeds");

  // Initial row, after the same normalization the engine applies when the
  // initial configuration is constructed.
  double init0, init1;
  if (is_automaton) {
    init0 = 1.0 - spec.automaton.sigma0;
    init1 = spec.automaton.sigma0;
  } else {
    init0 = spec.sigma0;
    init1 = 1.0 - spec.sigma0;
  }
  if (!normalize2(init0, init1))
    throw ParamError("batch: initial state is not a distribution");
  const double init_p = is_automaton ? init1 : init0;

  const std::size_t n_reps = seeds.size();
  for (std::size_t base = 0; base < n_reps; base += kLanes) {
    const int active = static_cast<int>(std::min<std::size_t>(kLanes, n_reps - base));

    std::uint64_t rs[kLanes];
    double c0[kLanes], c1[kLanes];
    double last_p[kLanes], stride_p[kLanes];
    bool violated[kLanes] = {false, false, false, false};
    for (int l = 0; l < kLanes; ++l) {
      rs[l] = l < active ? seeds[base + l] : 0;
      c0[l] = init0;
      c1[l] = init1;
      last_p[l] = init_p;
      stride_p[l] = init_p;
    }

    std::size_t k = 0;  // next curve point index
    std::size_t pending_hazard = accum.ts.size();

    // t = 0 curve point.
    if (!accum.ts.empty() && accum.ts[0] == 0) {
      double v[kLanes], v2[kLanes];
      for (int l = 0; l < kLanes; ++l) {
        const double p = l < active ? last_p[l] : 0.0;
        v[l] = p;
        v2[l] = p * p;
      }
      accum.sum_p[0] += hsum4(v);
      accum.sum_p2[0] += hsum4(v2);
      if (spec.horizon > 0) pending_hazard = 0;
      k = 1;
    }

    for (long long t = 0; t < spec.horizon; ++t) {
      const double theta = spec.theta ? spec.theta[t] : 1.0;
      for (int l = 0; l < kLanes; ++l) {
        SplitMix64 rng(rs[l]);
        double p0, p1;
        if (is_automaton) {
          const double u1 = rng.next_double();
          const double u2 = rng.next_double();
          const double u3 = rng.next_double();
          const double next = automaton_step(c1[l], beta, u1 < mu1, u2 < mu2, u3);
          p0 = 1.0 - next;
          p1 = next;
        } else {
          const double u = rng.next_double();
          p0 = absorbing_step(c0[l], u);
          p1 = 1.0 - p0;
        }
        rs[l] = rng.state;
        if (theta == 1.0) {
          c0[l] = p0;
          c1[l] = p1;
        } else {
          c0[l] = c0[l] + theta * (p0 - c0[l]);
          c1[l] = c1[l] + theta * (p1 - c1[l]);
        }
        if (!normalize2(c0[l], c1[l]) && l < active) {
          breach.hit = true;
          breach.step = t + 1;
          breach.lane = static_cast<std::int64_t>(base + l);
          return;
        }
      }

      if (pending_hazard < accum.ts.size()) {
        double h[kLanes];
        int cnt = 0;
        for (int l = 0; l < kLanes; ++l) {
          h[l] = 0.0;
          if (l >= active) continue;
          const double p = last_p[l];
          const double denom = p * (1.0 - p);
          if (denom >= 1e-15) {
            const double now = is_automaton ? c1[l] : c0[l];
            h[l] = (now - p) / denom;
            ++cnt;
          }
        }
        accum.sum_hazard[pending_hazard] += hsum4(h);
        accum.n_hazard[pending_hazard] += cnt;
        pending_hazard = accum.ts.size();
      }

      for (int l = 0; l < kLanes; ++l) last_p[l] = is_automaton ? c1[l] : c0[l];

      if (check_floor) {
        const double fl = spec.floor_p0 / static_cast<double>(t + 2);
        for (int l = 0; l < kLanes; ++l)
          if (last_p[l] < fl) violated[l] = true;
      }

      if (k < accum.ts.size() && accum.ts[k] == t + 1) {
        double v[kLanes], v2[kLanes], d[kLanes], d2[kLanes];
        for (int l = 0; l < kLanes; ++l) {
          const double p = l < active ? last_p[l] : 0.0;
          const double dp = l < active ? last_p[l] - stride_p[l] : 0.0;
          v[l] = p;
          v2[l] = p * p;
          d[l] = dp;
          d2[l] = dp * dp;
          stride_p[l] = last_p[l];
        }
        accum.sum_p[k] += hsum4(v);
        accum.sum_p2[k] += hsum4(v2);
        accum.sum_dp[k - 1] += hsum4(d);
        accum.sum_dp2[k - 1] += hsum4(d2);
        if (t + 1 < spec.horizon) pending_hazard = k;
        ++k;
      }
    }

    for (int l = 0; l < active; ++l) {
      terminal_p[base + l] = last_p[l];
      if (check_floor) floor_violated[base + l] = violated[l] ? 1 : 0;
    }
  }
}

}  // namespace batch
}  // namespace hazard
