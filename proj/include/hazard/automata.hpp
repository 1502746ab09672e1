#pragma once

#include "hazard/system.hpp"

namespace hazard {

// --- Absorbing coin system -------------------------------------------------
//
// Scalar state sigma in [0,1] = probability on the good action. One step:
// jump to 1 if u <= (1+sigma)/2, else to 0; the state 0 is absorbing (maps
// to 0 regardless of u). Satisfies the relative-gain bound with delta = 1/2
// and locks in at 1 with probability exactly (1+sigma0)/2: convergence, but
// no epsilon-free guarantee of optimality.
inline double absorbing_step(double sigma, double u) {
  return (sigma > 0.0 && u <= (1.0 + sigma) * 0.5) ? 1.0 : 0.0;
}

class AbsorbingModel final : public Model {
 public:
  explicit AbsorbingModel(double sigma0);

  int num_individuals() const override { return 1; }
  int num_actions() const override { return 2; }
  Configuration initial_config() const override;
  // Consumes 1 uniform per step. Row layout: (sigma, 1-sigma), good action
  // at index 0.
  void propose_into(SystemState& state, SplitMix64& rng, Configuration& proposed) const override;
  std::vector<StepOutcome> enumerate_outcomes(const SystemState& state) const override;
  const char* name() const override { return "absorbing"; }

  double sigma0() const { return sigma0_; }
  static OptimalSet optimal_set() { return OptimalSet::broadcast(1, 2, {0}); }

 private:
  double sigma0_;
};

// --- Two-armed Bernoulli automaton -----------------------------------------
//
// Classic reward-penalty automaton on two actions with success rates
// mu1 < mu2; sigma = probability on the better arm (index 1 in the row
// layout (1-sigma, sigma)). With retention beta in [0,1):
//   sigma' = sigma + (1-beta) * ( (1-sigma) * 1{w3 <= sigma, w2=1}
//                               -      sigma * 1{w3 >  sigma, w1=1} )
// Its relative gain is bounded below by (1-beta)(mu2-mu1) > 0 at every
// state, yet the inferior arm attracts with positive probability - the
// motivating case for damped updates.
struct TwoArmedParams {
  double beta = 0.5;
  double mu1 = 0.5;
  double mu2 = 0.8;
  double sigma0 = 0.5;

  void validate() const;
  double gain_floor() const { return (1.0 - beta) * (mu2 - mu1); }
};

// w1, w2 are the two arms' Bernoulli success flags, w3 the device uniform.
inline double automaton_step(double sigma, double beta, bool w1, bool w2, double w3) {
  const double up = (w3 <= sigma && w2) ? (1.0 - sigma) : 0.0;
  const double dn = (w3 > sigma && w1) ? sigma : 0.0;
  return sigma + (1.0 - beta) * (up - dn);
}

// Lower bound on the probability that the automaton locks in on the
// inferior arm (performance -> 0), as an N-term truncation of
//   prod_{j>=1} (1 - beta^{j-1} sigma0)^j * prod_{j>=1} (1 - (1-mu1)^j).
// Every factor lies in (0,1], so the truncation is nonincreasing in N and
// converges to the true infinite-product bound from above; N = 50 is within
// 1e-9 of the limit for the parameter ranges used here.
double inferior_lock_lower_bound(const TwoArmedParams& params, int terms);

class TwoArmedAutomaton final : public Model {
 public:
  explicit TwoArmedAutomaton(const TwoArmedParams& params);

  int num_individuals() const override { return 1; }
  int num_actions() const override { return 2; }
  Configuration initial_config() const override;
  // Consumes 3 uniforms per step, in the order u1 (arm-1 flag, w1 = u1 <
  // mu1), u2 (arm-2 flag), u3 (device).
  void propose_into(SystemState& state, SplitMix64& rng, Configuration& proposed) const override;
  std::vector<StepOutcome> enumerate_outcomes(const SystemState& state) const override;
  const char* name() const override { return "automaton"; }

  const TwoArmedParams& params() const { return params_; }
  static OptimalSet optimal_set() { return OptimalSet::broadcast(1, 2, {1}); }

 private:
  TwoArmedParams params_;
};

}  // namespace hazard
