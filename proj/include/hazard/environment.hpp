#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "hazard/errors.hpp"
#include "hazard/rng.hpp"
#include "hazard/simplex.hpp"

namespace hazard {

// Matching tolerance for means/CDF comparisons in optimal-set computation.
inline constexpr double kMeanTol = 1e-12;

// Declared payoff range; every support point must lie inside it.
struct PayoffSupport {
  double x_min = 0.0;
  double x_max = 1.0;

  PayoffSupport() = default;
  PayoffSupport(double lo, double hi) : x_min(lo), x_max(hi) {
    if (!(x_min < x_max)) throw ParamError("payoff support needs x_min < x_max");
  }
  double range() const { return x_max - x_min; }
};

// Finite payoff distribution: (value, probability) atoms. Canonicalized at
// construction: values sorted ascending, duplicates merged, probabilities
// nonnegative and summing to 1 within 1e-12.
struct PayoffDist {
  std::vector<std::pair<double, double>> atoms;

  PayoffDist() = default;
  PayoffDist(std::vector<std::pair<double, double>> entries, const PayoffSupport& support);

  double mean() const;
  double mean_pow(double p) const;  // E[x^p]
  double cdf(double x) const;       // P(X <= x), exact over atoms
  // Inverse-CDF draw consuming exactly one uniform: smallest atom index k
  // with u < cumulative probability through k (falls back to the last atom
  // if rounding leaves u beyond the accumulated total).
  double draw(SplitMix64& rng) const;
  double draw_from_uniform(double u) const;
};

// Stationary product environment: independent payoff draws per individual
// and action, identical across time. Cross-individual and cross-action
// independence is structural (each draw consumes its own uniforms).
class Environment {
 public:
  Environment() = default;
  // One distribution list per action, same for every individual.
  static Environment iid(PayoffSupport support, std::vector<PayoffDist> per_action,
                         int num_individuals = 1);
  // Fully general: dists[i][a].
  static Environment per_individual(PayoffSupport support,
                                    std::vector<std::vector<PayoffDist>> dists);

  int num_individuals() const { return static_cast<int>(dists_.size()); }
  int num_actions() const { return dists_.empty() ? 0 : static_cast<int>(dists_[0].size()); }
  const PayoffSupport& support() const { return support_; }
  const PayoffDist& dist(int individual, int action) const { return dists_[individual][action]; }
  bool identical_across_individuals() const { return identical_; }

  double mean(int individual, int action) const { return dists_[individual][action].mean(); }
  double draw(int individual, int action, SplitMix64& rng) const {
    return dists_[individual][action].draw(rng);
  }

 private:
  PayoffSupport support_;
  std::vector<std::vector<PayoffDist>> dists_;
  bool identical_ = true;
};

// Randomization device: smallest action a with u < sigma(0)+...+sigma(a).
// A boundary hit (u equal to the cumulative sum) selects the next action,
// so zero-probability actions are never chosen. u must lie in [0,1).
int choose_action(std::span<const double> sigma_row, double u);

// Argmax-by-expected-payoff optimal set, one action list per individual.
// Ties within 1e-12 are joined; a full tie across all actions makes the set
// non-strict and construction throws (surfaced to the caller).
OptimalSet optimal_set_expected(const Environment& env);

// First-order-stochastic-dominance winners for one individual: actions a
// whose CDF is <= every other action's CDF (within 1e-12) at every merged
// support point. Empty result = no dominant action (a value, not an error);
// a multi-action result can still fail OptimalSet strictness downstream.
std::vector<int> fosd_dominant_actions(const Environment& env, int individual);

// Convenience: per-individual FOSD sets assembled into an OptimalSet.
// Throws ParamError if some individual has no dominant action.
OptimalSet optimal_set_fosd(const Environment& env);

class SwitchFunction;      // individual rules
class ImitationComponent;  // social rules
class SamplingProcess;
struct ImitationRate;

// Which model family a hazard-rate lower bound is requested for, plus the
// family-specific inputs the closed forms need.
struct DeltaModel {
  enum class Kind { kConstant, kMonotone, kFullInfo, kRothErev, kSocial };
  Kind kind = Kind::kMonotone;

  // kConstant: a known time-independent floor (the two counterexample
  // systems carry theirs analytically).
  double constant_value = 0.0;
  // kMonotone: canonical coefficients B = c/(t+1).
  double monotone_c = 1.0;
  // kFullInfo.
  const SwitchFunction* switch_fn = nullptr;
  // kRothErev: minimum optimal-vs-other mean gap and initial attraction mass.
  double re_gap = 0.0;
  double re_v0 = 0.0;
  // kSocial.
  const ImitationComponent* component = nullptr;
  const SamplingProcess* sampling = nullptr;
  const ImitationRate* lambda = nullptr;

  static DeltaModel constant(double value);
  static DeltaModel monotone(double c);
  static DeltaModel full_info(const SwitchFunction& g);
  static DeltaModel roth_erev(double gap, double v0);
  static DeltaModel social(const ImitationComponent& comp, const SamplingProcess& samp,
                           const ImitationRate& lambda);
};

// Closed-form per-step hazard-rate lower bound delta_t for the given model
// on this environment (optimal set = argmax by expected payoff):
//   monotone:   min over (a*, b) of B_t * (rescaled mean gap), B_t = c/(t+1)
//   full info:  min over (a*, b) of E[g(x_b, x_a*)]            (exact atoms)
//   roth-erev:  gap / (2 * (V0 + (t+1) * x_max))
//   social:     lambda_t * (|W|-1) * xi * delta_tilde_t
double delta_lower_bound(const Environment& env, const DeltaModel& model, long long t);

}  // namespace hazard
