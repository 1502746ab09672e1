#include "hazard/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hazard {

Configuration::Configuration(int num_individuals, int num_actions, std::vector<double> entries) {
  if (num_individuals < 1) throw ParamError("configuration needs at least one individual");
  if (num_actions < 2) throw ParamError("configuration needs at least two actions");
  if (entries.size() != static_cast<std::size_t>(num_individuals) * num_actions)
    throw ConfigError("configuration entry count " + std::to_string(entries.size()) +
                      " does not match " + std::to_string(num_individuals) + "x" +
                      std::to_string(num_actions));
  individuals_ = num_individuals;
  actions_ = num_actions;
  data_ = std::move(entries);
  for (int i = 0; i < individuals_; ++i) {
    for (double c : row(i))
      if (!(c >= -kSimplexTol && c <= 1.0 + kSimplexTol))
        throw ParamError("configuration entry " + std::to_string(c) + " for individual " +
                         std::to_string(i) + " is outside [0,1]");
    if (!normalize_row(row(i)))
      throw ParamError("configuration row for individual " + std::to_string(i) +
                       " does not sum to 1 within 1e-12");
  }
}

OptimalSet::OptimalSet(int num_actions, std::vector<std::vector<int>> actions) {
  if (num_actions < 2) throw ParamError("optimal set needs at least two actions");
  if (actions.empty()) throw ParamError("optimal set needs at least one individual");
  num_actions_ = num_actions;
  for (auto& set : actions) {
    std::sort(set.begin(), set.end());
    set.erase(std::unique(set.begin(), set.end()), set.end());
    if (set.empty()) throw ParamError("optimal action set must be nonempty");
    for (int a : set)
      if (a < 0 || a >= num_actions)
        throw ParamError("optimal action index " + std::to_string(a) + " out of range");
    if (static_cast<int>(set.size()) == num_actions)
      throw ParamError("optimal action set must be a strict subset of the action set");
  }
  actions_ = std::move(actions);
}

OptimalSet OptimalSet::broadcast(int num_individuals, int num_actions, std::vector<int> actions) {
  if (num_individuals < 1) throw ParamError("optimal set needs at least one individual");
  std::vector<std::vector<int>> all(static_cast<std::size_t>(num_individuals), actions);
  return OptimalSet(num_actions, std::move(all));
}

double aggregate(const Configuration& sigma, const OptimalSet& optimal) {
  if (sigma.num_individuals() != optimal.num_individuals() ||
      sigma.num_actions() != optimal.num_actions())
    throw ConfigError("aggregate: configuration is " + std::to_string(sigma.num_individuals()) +
                      "x" + std::to_string(sigma.num_actions()) + " but optimal set is " +
                      std::to_string(optimal.num_individuals()) + "x" +
                      std::to_string(optimal.num_actions()));
  double total = 0.0;
  for (int i = 0; i < sigma.num_individuals(); ++i) {
    double mass = 0.0;
    for (int a : optimal.of(i)) mass += sigma(i, a);
    total += mass;
  }
  return total / static_cast<double>(sigma.num_individuals());
}

bool slow_step_into(const Configuration& sigma, const Configuration& proposed, double theta,
                    Configuration& out) {
  const std::size_t n = sigma.data().size();
  if (theta == 1.0) {
    // Exact copy: the damped system with theta=1 must reproduce the base
    // system bit for bit, and sigma + 1*(p - sigma) does not round to p.
    out.data() = proposed.data();
  } else {
    const double* s = sigma.data().data();
    const double* p = proposed.data().data();
    double* o = out.data().data();
    for (std::size_t k = 0; k < n; ++k) o[k] = s[k] + theta * (p[k] - s[k]);
  }
  for (int i = 0; i < out.num_individuals(); ++i)
    if (!normalize_row(out.row(i))) return false;
  return true;
}

Configuration slow_step(const Configuration& sigma, const Configuration& proposed, double theta) {
  if (!sigma.same_shape(proposed)) throw ConfigError("slow_step: shape mismatch");
  if (!(theta > 0.0 && theta <= 1.0))
    throw ParamError("slow_step: theta must lie in (0,1], got " + std::to_string(theta));
  Configuration out = Configuration::zeros(sigma.num_individuals(), sigma.num_actions());
  if (!slow_step_into(sigma, proposed, theta, out))
    throw ParamError("slow_step: result left the simplex beyond tolerance");
  return out;
}

}  // namespace hazard
