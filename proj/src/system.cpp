#include "hazard/system.hpp"

#include <string>

namespace hazard {

std::vector<StepOutcome> Model::enumerate_outcomes(const SystemState&) const {
  throw UnsupportedError(std::string(name()) + ": exact one-step enumeration not supported");
}

SystemState System::initial_state() const {
  if (!model) throw ConfigError("system has no model");
  SystemState s;
  s.t = 0;
  s.config = model->initial_config();
  s.info = model->initial_info();
  return s;
}

Trajectory run_trajectory(const System& system, long long horizon, std::uint64_t seed,
                          const TrajectoryOptions& options) {
  if (!system.model) throw ConfigError("system has no model");
  if (horizon < 0) throw ParamError("horizon must be nonnegative");
  const Model& model = *system.model;

  SystemState state = system.initial_state();
  SplitMix64 rng(seed);
  state.rng_state = rng.state;

  Trajectory traj;
  traj.seed = seed;
  traj.horizon = horizon;
  traj.performance.reserve(static_cast<std::size_t>(horizon) + 1);
  if (system.slowing) traj.schedule_kind = system.slowing->kind;

  Configuration proposed = Configuration::zeros(model.num_individuals(), model.num_actions());
  Configuration next = Configuration::zeros(model.num_individuals(), model.num_actions());

  traj.performance.push_back(aggregate(state.config, system.optimal));
  if (options.config_stride > 0) traj.config_snapshots.emplace_back(0, state.config);
  if (options.on_state) options.on_state(state);

  for (long long t = 0; t < horizon; ++t) {
    model.propose_into(state, rng, proposed);
    const double theta = system.theta_at(t);
    if (!(theta > 0.0 && theta <= 1.0))
      throw ParamError("schedule produced theta outside (0,1] at step " + std::to_string(t));
    if (!slow_step_into(state.config, proposed, theta, next))
      throw InvariantError("configuration left the simplex beyond 1e-12", t + 1, seed);
    std::swap(state.config, next);
    state.t = t + 1;
    state.rng_state = rng.state;

    traj.performance.push_back(aggregate(state.config, system.optimal));
    if (options.config_stride > 0 &&
        ((t + 1) % options.config_stride == 0 || t + 1 == horizon))
      traj.config_snapshots.emplace_back(t + 1, state.config);
    if (options.on_state) options.on_state(state);
  }

  traj.final_config = state.config;
  traj.final_info = state.info;
  return traj;
}

Configuration exact_one_step_mean(const System& system, const SystemState& state) {
  if (!system.model) throw ConfigError("system has no model");
  const auto outcomes = system.model->enumerate_outcomes(state);
  const double theta = system.theta_at(state.t);
  Configuration mean =
      Configuration::zeros(state.config.num_individuals(), state.config.num_actions());
  Configuration damped =
      Configuration::zeros(state.config.num_individuals(), state.config.num_actions());
  for (const auto& outcome : outcomes) {
    if (!slow_step_into(state.config, outcome.proposed, theta, damped))
      throw ParamError("enumerated outcome left the simplex beyond tolerance");
    for (std::size_t k = 0; k < mean.data().size(); ++k)
      mean.data()[k] += outcome.prob * damped.data()[k];
  }
  return mean;
}

}  // namespace hazard
