#pragma once

#include <utility>

#include "hazard/environment.hpp"
#include "hazard/system.hpp"

namespace hazard {

// Per-step imitation weight lambda_t in [0,1].
struct ImitationRate {
  enum class Kind { kConstant, kHarmonic };
  Kind kind = Kind::kConstant;
  double value = 1.0;

  static ImitationRate constant(double lambda);
  static ImitationRate harmonic();  // lambda_t = 1/(t+2)
  double eval(long long t) const;
};

// Who observes whom: each individual i draws a sample (a subset of the
// population containing i) independently each step. The explicit-table form
// requires the symmetric weighting rho(s) to be a valid distribution over
// {s : i in s} for every i, so all members of a set agree on its weight.
class SamplingProcess {
 public:
  enum class Kind { kUniformPairs, kUniformK, kExplicit };

  // One uniformly random other individual (samples of size 2).
  static SamplingProcess uniform_pairs(int num_individuals);
  // k uniformly random others without replacement (samples of size k+1).
  static SamplingProcess uniform_k(int num_individuals, int k);
  // sets: (sorted members, weight). Each individual's incident weights must
  // sum to 1; every pair must co-occur with positive probability.
  static SamplingProcess explicit_table(int num_individuals,
                                        std::vector<std::pair<std::vector<int>, double>> sets);

  Kind kind() const { return kind_; }
  int num_individuals() const { return individuals_; }
  int k() const { return k_; }
  // Observability floor: min over pairs i != j of P(j in i's sample).
  double xi() const { return xi_; }
  // Fixed uniform consumption per draw (stream-stability contract).
  int uniforms_per_draw() const;

  // Draw observer i's sample into `out` (ascending members, i included).
  void draw(int i, SplitMix64& rng, std::vector<int>& out) const;
  // Exact sample distribution for observer i (ascending member lists).
  std::vector<std::pair<std::vector<int>, double>> enumerate(int i) const;
  // Distinct sample sizes occurring with positive probability, ascending.
  std::vector<int> sample_sizes() const;

 private:
  Kind kind_ = Kind::kUniformPairs;
  int individuals_ = 0;
  int k_ = 1;
  double xi_ = 0.0;
  std::vector<std::pair<std::vector<int>, double>> sets_;               // explicit only
  std::vector<std::vector<int>> incident_;                              // per-observer set ids
};

// How an observer converts the sample's realized payoffs into imitation
// weights over the sample members. Weights are a probability vector aligned
// with the member list; the self weight absorbs the remainder.
class ImitationComponent {
 public:
  enum class Kind { kProportional, kNormalizedScore, kLinearPairwise };

  // weight_j = x_j / (|s| * x_max) for j != self, remainder to self.
  static ImitationComponent proportional();
  // weight_k = x_k^q / sum_m x_m^q over all members (self included);
  // an all-zero sample degrades to the uniform weighting 1/|s|.
  static ImitationComponent normalized_score(double q);
  // weight_j = b * max(x_j - x_self, 0) / (|s| - 1), remainder to self.
  static ImitationComponent linear_pairwise(double b);

  Kind kind() const { return kind_; }
  double score_exponent() const { return q_; }
  double slope() const { return b_; }

  // Imitation weights over sample members. `self` indexes into payoffs.
  void weights(std::span<const double> payoffs, int self, const PayoffSupport& support,
               std::span<double> out) const;
  void validate_on(const PayoffSupport& support) const;

 private:
  Kind kind_ = Kind::kProportional;
  double q_ = 1.0;
  double b_ = 1.0;
};

// Imitation weights folded over actions: member_weights summed per action.
std::vector<double> imitation_probs(const ImitationComponent& comp,
                                    std::span<const int> member_actions,
                                    std::span<const double> member_payoffs, int self,
                                    const PayoffSupport& support, int num_actions);

// One observer's proposed mixed action:
//   L_a = lambda * (imitation mass on a) + (1 - lambda) * sigma(a)
std::vector<double> behavioral_update(const ImitationComponent& comp,
                                      std::span<const int> member_actions,
                                      std::span<const double> member_payoffs, int self,
                                      double lambda, std::span<const double> sigma_row,
                                      const PayoffSupport& support);

// One synchronous population step. Draw order is part of the determinism
// contract: all action devices (individuals ascending), then all payoffs
// (ascending), then all samples (ascending).
void population_step(const Configuration& config, const ImitationComponent& comp,
                     const SamplingProcess& sampling, double lambda, const Environment& env,
                     SplitMix64& rng, Configuration& proposed);

class SocialModel final : public Model {
 public:
  SocialModel(Environment env, ImitationComponent comp, SamplingProcess sampling,
              ImitationRate rate, Configuration sigma0);

  int num_individuals() const override { return env_.num_individuals(); }
  int num_actions() const override { return env_.num_actions(); }
  Configuration initial_config() const override { return sigma0_; }
  void propose_into(SystemState& state, SplitMix64& rng, Configuration& proposed) const override;
  std::vector<StepOutcome> enumerate_outcomes(const SystemState& state) const override;
  const char* name() const override { return "social"; }

  const Environment& env() const { return env_; }
  const ImitationComponent& component() const { return comp_; }
  const SamplingProcess& sampling() const { return sampling_; }
  const ImitationRate& rate() const { return rate_; }

 private:
  Environment env_;
  ImitationComponent comp_;
  SamplingProcess sampling_;
  ImitationRate rate_;
  Configuration sigma0_;
};

// Exact net-attraction floor of the component for a given sample size:
// minimum over (optimal a_i, non-optimal a_j, arbitrary other actions) of
// E[weight j's view gives i  -  weight i's view gives j], the expectation
// running over the members' payoff draws. Positive for all built-ins on
// environments with a strict mean gap. Requires identical payoff
// distributions across individuals.
double delta_tilde_exact(const ImitationComponent& comp, const Environment& env, int sample_size);

// Exact one-step conditional check of the expected-improvement inequality at
// one configuration: gain = E[performance(proposal)] - performance(config)
// against bound = delta_t * P * (1 - P), by full joint enumeration.
struct SocialWberhrPoint {
  double performance = 0.0;
  double gain = 0.0;
  double delta = 0.0;
  double bound = 0.0;
  double slack = 0.0;  // gain - bound
  bool holds = false;
};
SocialWberhrPoint wberhr_social_exact(const SocialModel& model, const OptimalSet& optimal,
                                      const Configuration& config, long long t);

}  // namespace hazard
