#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "hazard/environment.hpp"
#include "hazard/rng.hpp"
#include "hazard/schedule.hpp"
#include "hazard/simplex.hpp"

namespace hazard {

// Recorded state of a system: step count, mixed actions, and the model's
// information payload (opaque to the engine; e.g. attraction weights).
struct SystemState {
  long long t = 0;
  Configuration config;
  std::vector<double> info;
  std::uint64_t rng_state = 0;  // stream position snapshot, for freeze/resume
};

// One exactly-enumerated one-step outcome: probability and proposed
// configuration (before any damping).
struct StepOutcome {
  double prob = 0.0;
  Configuration proposed;
};

// An updating rule plus its information-state dynamics. propose_into draws
// the step's randomness, writes the proposed configuration, and applies the
// information update in place; the engine then damps and normalizes.
class Model {
 public:
  virtual ~Model() = default;

  virtual int num_individuals() const = 0;
  virtual int num_actions() const = 0;
  virtual Configuration initial_config() const = 0;
  virtual std::vector<double> initial_info() const { return {}; }

  // state.t is the time being stepped FROM; state.config must not change
  // (the engine owns the damped write-back), state.info may.
  virtual void propose_into(SystemState& state, SplitMix64& rng, Configuration& proposed) const = 0;

  // Exact one-step outcome distribution at `state` (undamped proposals).
  // Models guard feasibility and throw UnsupportedError beyond it.
  virtual std::vector<StepOutcome> enumerate_outcomes(const SystemState& state) const;

  virtual const char* name() const = 0;
};

// A runnable system: model + performance aggregator + optional damping.
struct System {
  std::shared_ptr<const Model> model;
  OptimalSet optimal;
  std::optional<SlowingSchedule> slowing;

  SystemState initial_state() const;
  double theta_at(long long t) const { return slowing ? slowing->eval(t) : 1.0; }
};

struct TrajectoryOptions {
  // Record full configuration snapshots every `config_stride` steps
  // (0 = none). Performance is always recorded at every step.
  long long config_stride = 0;
  // Called on the initial state and after every step.
  std::function<void(const SystemState&)> on_state;
};

struct Trajectory {
  std::uint64_t seed = 0;
  long long horizon = 0;
  std::vector<double> performance;  // length horizon+1
  // Which damping the run used; lets floor checks verify their precondition.
  std::optional<SlowingSchedule::Kind> schedule_kind;
  std::vector<std::pair<long long, Configuration>> config_snapshots;
  Configuration final_config;
  std::vector<double> final_info;
};

// Simulate `horizon` steps from the model's initial state with one
// SplitMix64 stream seeded by `seed`. Deterministic: identical inputs give
// bit-identical trajectories. A simplex breach beyond tolerance raises
// InvariantError carrying the step index and seed.
Trajectory run_trajectory(const System& system, long long horizon, std::uint64_t seed,
                          const TrajectoryOptions& options = {});

// Exact conditional mean of the next configuration (damped with the
// system's theta at state.t), by outcome enumeration.
Configuration exact_one_step_mean(const System& system, const SystemState& state);

}  // namespace hazard
