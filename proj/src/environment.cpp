#include "hazard/environment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hazard/individual.hpp"
#include "hazard/social.hpp"

namespace hazard {

// --- PayoffDist -------------------------------------------------------------

PayoffDist::PayoffDist(std::vector<std::pair<double, double>> entries,
                       const PayoffSupport& support) {
  if (entries.empty()) throw ParamError("payoff distribution needs at least one atom");
  for (const auto& [value, prob] : entries) {
    if (!(prob >= 0.0)) throw ParamError("payoff atom probability must be nonnegative");
    if (!(value >= support.x_min - kMeanTol && value <= support.x_max + kMeanTol)) {
      throw ParamError("payoff atom " + std::to_string(value) + " outside the declared support [" +
                       std::to_string(support.x_min) + ", " + std::to_string(support.x_max) + "]");
    }
  }
  std::sort(entries.begin(), entries.end());
  double sum = 0.0;
  for (const auto& [value, prob] : entries) {
    if (prob == 0.0) continue;
    if (!atoms.empty() && atoms.back().first == value) {
      atoms.back().second += prob;
    } else {
      atoms.push_back({value, prob});
    }
    sum += prob;
  }
  if (atoms.empty()) throw ParamError("payoff distribution has no probability mass");
  if (std::abs(sum - 1.0) > kMeanTol) {
    throw ParamError("payoff atom probabilities sum to " + std::to_string(sum) + ", not 1");
  }
  for (auto& [value, prob] : atoms) prob /= sum;
}

double PayoffDist::mean() const {
  double m = 0.0;
  for (const auto& [value, prob] : atoms) m += value * prob;
  return m;
}

double PayoffDist::mean_pow(double p) const {
  double m = 0.0;
  for (const auto& [value, prob] : atoms) m += std::pow(value, p) * prob;
  return m;
}

double PayoffDist::cdf(double x) const {
  double c = 0.0;
  for (const auto& [value, prob] : atoms) {
    if (value <= x + kMeanTol) c += prob;
  }
  return c;
}

double PayoffDist::draw(SplitMix64& rng) const { return draw_from_uniform(rng.next_double()); }

double PayoffDist::draw_from_uniform(double u) const {
  double acc = 0.0;
  for (const auto& [value, prob] : atoms) {
    acc += prob;
    if (u < acc) return value;
  }
  return atoms.back().first;  // rounding left u beyond the accumulated total
}

// --- Environment ------------------------------------------------------------

namespace {

void check_in_support(const std::vector<PayoffDist>& row, const PayoffSupport& support) {
  for (const auto& dist : row) {
    if (dist.atoms.empty()) throw ParamError("payoff distribution has no atoms");
    for (const auto& [value, prob] : dist.atoms) {
      if (!(value >= support.x_min - kMeanTol && value <= support.x_max + kMeanTol)) {
        throw ParamError("payoff atom outside the declared support");
      }
    }
  }
}

}  // namespace

Environment Environment::iid(PayoffSupport support, std::vector<PayoffDist> per_action,
                             int num_individuals) {
  if (per_action.empty()) throw ParamError("environment needs at least one action");
  if (num_individuals < 1) throw ParamError("environment needs at least one individual");
  check_in_support(per_action, support);
  Environment env;
  env.support_ = support;
  env.dists_.assign(static_cast<std::size_t>(num_individuals), per_action);
  env.identical_ = true;
  return env;
}

Environment Environment::per_individual(PayoffSupport support,
                                        std::vector<std::vector<PayoffDist>> dists) {
  if (dists.empty() || dists[0].empty()) {
    throw ParamError("environment needs at least one individual and one action");
  }
  const std::size_t actions = dists[0].size();
  for (const auto& row : dists) {
    if (row.size() != actions) throw ParamError("every individual needs the same action count");
    check_in_support(row, support);
  }
  Environment env;
  env.support_ = support;
  env.dists_ = std::move(dists);
  env.identical_ = true;
  for (const auto& row : env.dists_) {
    for (std::size_t a = 0; a < actions; ++a) {
      if (row[a].atoms != env.dists_[0][a].atoms) {
        env.identical_ = false;
        break;
      }
    }
    if (!env.identical_) break;
  }
  return env;
}

// --- Randomization device ---------------------------------------------------

int choose_action(std::span<const double> sigma_row, double u) {
  if (!(u >= 0.0 && u < 1.0)) throw ParamError("device draw must lie in [0,1)");
  const int n = static_cast<int>(sigma_row.size());
  double acc = 0.0;
  for (int a = 0; a < n; ++a) {
    acc += sigma_row[a];
    if (u < acc) return a;
  }
  for (int a = n - 1; a >= 0; --a) {
    if (sigma_row[a] > 0.0) return a;  // rounding left u beyond the accumulated total
  }
  throw ParamError("mixed action has no probability mass");
}

// --- Optimal sets -----------------------------------------------------------

OptimalSet optimal_set_expected(const Environment& env) {
  const int W = env.num_individuals();
  const int A = env.num_actions();
  std::vector<std::vector<int>> lists(static_cast<std::size_t>(W));
  for (int i = 0; i < W; ++i) {
    double best = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < A; ++a) best = std::max(best, env.mean(i, a));
    for (int a = 0; a < A; ++a) {
      if (env.mean(i, a) >= best - kMeanTol) lists[static_cast<std::size_t>(i)].push_back(a);
    }
  }
  return OptimalSet(A, std::move(lists));
}

std::vector<int> fosd_dominant_actions(const Environment& env, int individual) {
  if (individual < 0 || individual >= env.num_individuals()) {
    throw ParamError("individual index out of range");
  }
  const int A = env.num_actions();
  std::vector<double> points;
  for (int a = 0; a < A; ++a) {
    for (const auto& [value, prob] : env.dist(individual, a).atoms) points.push_back(value);
  }
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());

  std::vector<int> out;
  for (int a = 0; a < A; ++a) {
    bool dominant = true;
    for (int b = 0; b < A && dominant; ++b) {
      if (b == a) continue;
      for (double x : points) {
        if (env.dist(individual, a).cdf(x) > env.dist(individual, b).cdf(x) + kMeanTol) {
          dominant = false;
          break;
        }
      }
    }
    if (dominant) out.push_back(a);
  }
  return out;
}

OptimalSet optimal_set_fosd(const Environment& env) {
  const int W = env.num_individuals();
  std::vector<std::vector<int>> lists(static_cast<std::size_t>(W));
  for (int i = 0; i < W; ++i) {
    lists[static_cast<std::size_t>(i)] = fosd_dominant_actions(env, i);
    if (lists[static_cast<std::size_t>(i)].empty()) {
      throw ParamError("individual " + std::to_string(i) +
                       " has no stochastically dominant action");
    }
  }
  return OptimalSet(env.num_actions(), std::move(lists));
}

// --- Hazard-rate lower bounds -----------------------------------------------

DeltaModel DeltaModel::constant(double value) {
  if (!(value >= 0.0)) throw ParamError("hazard floor must be nonnegative");
  DeltaModel m;
  m.kind = Kind::kConstant;
  m.constant_value = value;
  return m;
}

DeltaModel DeltaModel::monotone(double c) {
  DeltaModel m;
  m.kind = Kind::kMonotone;
  m.monotone_c = c;
  return m;
}

DeltaModel DeltaModel::full_info(const SwitchFunction& g) {
  DeltaModel m;
  m.kind = Kind::kFullInfo;
  m.switch_fn = &g;
  return m;
}

DeltaModel DeltaModel::roth_erev(double gap, double v0) {
  DeltaModel m;
  m.kind = Kind::kRothErev;
  m.re_gap = gap;
  m.re_v0 = v0;
  return m;
}

DeltaModel DeltaModel::social(const ImitationComponent& comp, const SamplingProcess& samp,
                              const ImitationRate& lambda) {
  DeltaModel m;
  m.kind = Kind::kSocial;
  m.component = &comp;
  m.sampling = &samp;
  m.lambda = &lambda;
  return m;
}

namespace {

// Smallest optimal-vs-other pair statistic over the expected-payoff optimal
// set of a single-individual environment.
template <typename PairStat>
double min_over_gap_pairs(const Environment& env, PairStat&& stat) {
  if (env.num_individuals() != 1) {
    throw ParamError("this hazard bound applies to single-individual rules");
  }
  const OptimalSet optimal = optimal_set_expected(env);
  const auto& best = optimal.of(0);
  double out = std::numeric_limits<double>::infinity();
  for (int a : best) {
    for (int b = 0; b < env.num_actions(); ++b) {
      if (std::find(best.begin(), best.end(), b) != best.end()) continue;
      out = std::min(out, stat(a, b));
    }
  }
  return out;
}

}  // namespace

double delta_lower_bound(const Environment& env, const DeltaModel& model, long long t) {
  if (t < 0) throw ParamError("negative time index");
  switch (model.kind) {
    case DeltaModel::Kind::kConstant:
      return model.constant_value;
    case DeltaModel::Kind::kMonotone: {
      if (!(model.monotone_c > 0.0 && model.monotone_c <= 1.0)) {
        throw ParamError("canonical monotone family needs c in (0,1]");
      }
      const double b_t = model.monotone_c / static_cast<double>(t + 1);
      const double range = env.support().range();
      return min_over_gap_pairs(
          env, [&](int a, int b) { return b_t * (env.mean(0, a) - env.mean(0, b)) / range; });
    }
    case DeltaModel::Kind::kFullInfo: {
      if (model.switch_fn == nullptr) throw ParamError("switch function missing");
      model.switch_fn->validate_on(env.support());
      return min_over_gap_pairs(env, [&](int a, int b) {
        double e = 0.0;
        for (const auto& [vb, pb] : env.dist(0, b).atoms) {
          for (const auto& [va, pa] : env.dist(0, a).atoms) {
            e += pb * pa * model.switch_fn->eval(vb, va);
          }
        }
        return e;
      });
    }
    case DeltaModel::Kind::kRothErev: {
      if (!(model.re_gap > 0.0)) throw ParamError("mean-payoff gap must be positive");
      if (!(model.re_v0 > 0.0)) throw ParamError("initial attraction mass must be positive");
      const double x_max = env.support().x_max;
      return model.re_gap /
             (2.0 * (model.re_v0 + static_cast<double>(t + 1) * x_max));
    }
    case DeltaModel::Kind::kSocial: {
      if (model.component == nullptr || model.sampling == nullptr || model.lambda == nullptr) {
        throw ParamError("social hazard bound needs component, sampling, and rate");
      }
      const int W = env.num_individuals();
      if (model.sampling->num_individuals() != W) {
        throw ParamError("sampling population size does not match the environment");
      }
      double floor = std::numeric_limits<double>::infinity();
      for (int size : model.sampling->sample_sizes()) {
        floor = std::min(floor, delta_tilde_exact(*model.component, env, size));
      }
      return model.lambda->eval(t) * static_cast<double>(W - 1) * model.sampling->xi() * floor;
    }
  }
  throw ParamError("unknown hazard-bound model kind");
}

}  // namespace hazard
