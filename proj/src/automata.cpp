#include "hazard/automata.hpp"

#include <cmath>
#include <string>

namespace hazard {

AbsorbingModel::AbsorbingModel(double sigma0) : sigma0_(sigma0) {
  if (!(sigma0 >= 0.0 && sigma0 <= 1.0))
    throw ParamError("absorbing: sigma0 must lie in [0,1], got " + std::to_string(sigma0));
}

Configuration AbsorbingModel::initial_config() const {
  return Configuration::single({sigma0_, 1.0 - sigma0_});
}

void AbsorbingModel::propose_into(SystemState& state, SplitMix64& rng,
                                  Configuration& proposed) const {
  const double sigma = state.config(0, 0);
  const double u = rng.next_double();
  const double next = absorbing_step(sigma, u);
  proposed(0, 0) = next;
  proposed(0, 1) = 1.0 - next;
}

std::vector<StepOutcome> AbsorbingModel::enumerate_outcomes(const SystemState& state) const {
  const double sigma = state.config(0, 0);
  std::vector<StepOutcome> out;
  if (sigma > 0.0) {
    out.push_back({(1.0 + sigma) * 0.5, Configuration::single({1.0, 0.0})});
    if (sigma < 1.0) out.push_back({(1.0 - sigma) * 0.5, Configuration::single({0.0, 1.0})});
  } else {
    out.push_back({1.0, Configuration::single({0.0, 1.0})});
  }
  return out;
}

void TwoArmedParams::validate() const {
  if (!(beta >= 0.0 && beta < 1.0))
    throw ParamError("automaton: beta must lie in [0,1), got " + std::to_string(beta));
  if (!(mu1 >= 0.0 && mu1 <= 1.0 && mu2 >= 0.0 && mu2 <= 1.0))
    throw ParamError("automaton: success rates must lie in [0,1]");
  if (!(mu1 < mu2))
    throw ParamError("automaton: needs mu1 < mu2, got mu1=" + std::to_string(mu1) +
                     " mu2=" + std::to_string(mu2));
  if (!(sigma0 >= 0.0 && sigma0 <= 1.0))
    throw ParamError("automaton: sigma0 must lie in [0,1], got " + std::to_string(sigma0));
}

double inferior_lock_lower_bound(const TwoArmedParams& params, int terms) {
  params.validate();
  if (terms < 1) throw ParamError("inferior_lock_lower_bound: need at least one term");
  double no_up = 1.0;    // never escaping upward
  double all_down = 1.0; // the inferior arm keeps firing
  double beta_pow = 1.0; // beta^{j-1}
  double miss_pow = 1.0; // (1-mu1)^j accumulator
  for (int j = 1; j <= terms; ++j) {
    no_up *= std::pow(1.0 - beta_pow * params.sigma0, static_cast<double>(j));
    beta_pow *= params.beta;
    miss_pow *= 1.0 - params.mu1;
    all_down *= 1.0 - miss_pow;
  }
  return no_up * all_down;
}

TwoArmedAutomaton::TwoArmedAutomaton(const TwoArmedParams& params) : params_(params) {
  params_.validate();
}

Configuration TwoArmedAutomaton::initial_config() const {
  return Configuration::single({1.0 - params_.sigma0, params_.sigma0});
}

void TwoArmedAutomaton::propose_into(SystemState& state, SplitMix64& rng,
                                     Configuration& proposed) const {
  const double sigma = state.config(0, 1);
  const double u1 = rng.next_double();
  const double u2 = rng.next_double();
  const double u3 = rng.next_double();
  const double next = automaton_step(sigma, params_.beta, u1 < params_.mu1, u2 < params_.mu2, u3);
  proposed(0, 0) = 1.0 - next;
  proposed(0, 1) = next;
}

std::vector<StepOutcome> TwoArmedAutomaton::enumerate_outcomes(const SystemState& state) const {
  const double sigma = state.config(0, 1);
  const double up = automaton_step(sigma, params_.beta, false, true, 0.0);
  const double dn = automaton_step(sigma, params_.beta, true, false, 1.0);
  const double p_up = sigma * params_.mu2;          // device <= sigma and arm 2 fires
  const double p_dn = (1.0 - sigma) * params_.mu1;  // device > sigma and arm 1 fires
  std::vector<StepOutcome> out;
  if (p_up > 0.0) out.push_back({p_up, Configuration::single({1.0 - up, up})});
  if (p_dn > 0.0) out.push_back({p_dn, Configuration::single({1.0 - dn, dn})});
  const double p_stay = 1.0 - p_up - p_dn;
  if (p_stay > 0.0) out.push_back({p_stay, Configuration::single({1.0 - sigma, sigma})});
  return out;
}

}  // namespace hazard
