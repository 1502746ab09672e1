#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "hazard/automata.hpp"
#include "hazard/diagnostics.hpp"
#include "hazard/environment.hpp"
#include "hazard/individual.hpp"
#include "hazard/social.hpp"
#include "hazard/system.hpp"

namespace hazard {

// Parsed experiment description. Flat INI-style text with [section] headers
// and key = value lines; '#' and ';' start comments. Sections: [experiment]
// always; one model section matching `model`; [environment] for the four
// environment-driven models; [slowing] optionally. Unknown sections, unknown
// keys, and duplicate keys are rejected by name.
struct ExperimentConfig {
  // [experiment]
  std::string model;  // absorbing | automaton | monotone | full_info | roth_erev | social
  long long horizon = 0;
  long long replications = 0;
  std::uint64_t seed = 1;
  long long stride = 0;
  int workers = 1;
  std::string out_dir = "out";
  double class_hi = kOptimalThreshold;
  double class_lo = kNullThreshold;
  bool floor_check = false;

  // [environment]
  bool has_environment = false;
  double x_min = 0.0;
  double x_max = 1.0;
  int individuals = 1;
  std::vector<std::vector<std::pair<double, double>>> dists;  // per action: (value, prob) atoms

  // [absorbing] / [automaton]
  double absorbing_sigma0 = 0.5;
  TwoArmedParams automaton;

  // [monotone] / [full_info] / [roth_erev] / [social]
  double monotone_c = 1.0;
  std::vector<double> sigma0;     // initial mixed action (broadcast per individual)
  std::string switch_spec;        // "linear b" | "power beta p"
  std::vector<double> attractions;
  std::string component_spec;     // "proportional" | "normalized_score q" | "linear_pairwise b"
  std::string sampling_spec;      // "uniform_pairs" | "uniform_k k"
  std::string lambda_spec;        // "harmonic" | "constant v"

  // [slowing]
  bool has_slowing = false;
  std::string slow_kind;  // constant | harmonic | epsilon_guarantee
  double slow_theta = 1.0;
  double slow_p0 = 0.0;
  double slow_epsilon = 0.1;
  double slow_delta = 0.0;
};

// Throws ConfigError naming the offending section/key on any problem.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::string& path);

// Canonical rendering; parse(serialize(c)) reproduces c.
std::string serialize_config(const ExperimentConfig& config);

// A validated, runnable experiment. The shared_ptr members own the pieces
// the hazard-bound descriptor points into.
struct BuiltExperiment {
  System system;
  Environment env;
  RunPlan plan;
  std::string out_dir;
  DeltaModel delta;  // closed-form hazard floor for this model

  std::shared_ptr<SwitchFunction> switch_fn;
  std::shared_ptr<ImitationComponent> component;
  std::shared_ptr<SamplingProcess> sampling;
  std::shared_ptr<ImitationRate> lambda;
};

// Validates everything the referenced modules require; throws ConfigError /
// ParamError with the offending detail.
BuiltExperiment build_experiment(const ExperimentConfig& config);

}  // namespace hazard
