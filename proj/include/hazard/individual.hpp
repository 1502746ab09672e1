#pragma once

#include <string>

#include "hazard/environment.hpp"
#include "hazard/system.hpp"

namespace hazard {

// --- Monotone single-agent rules -------------------------------------------
//
// After choosing action b and observing its payoff x (rescaled to [0,1]),
// the chosen action gains and every other action a loses proportionally:
//   L(b,x)_b = sigma(b) + (1-sigma(b)) * gain_b(x)
//   L(b,x)_a = sigma(a) * (1 - (A(b,a) + B(b,a) x)),   a != b
// The diagonal term is tied to the off-diagonal ones by the mixing identity
//   A(a,a) = sum_c sigma(c) A(c,a)  (same for B, weights sigma(c) over the
// first index), which is exactly what makes the expected motion collapse to
// the closed form in expected_change_* below.
struct MonotoneParams {
  bool canonical = true;

  // Canonical family: A(b,a) = (1-c)/(t+1), B(b,a) = c/(t+1) for every pair
  // (diagonal included), c in (0,1]. The step taken from recorded time t
  // uses t in these formulas (so t=0, c=1 gives pure payoff weighting).
  double c = 1.0;

  // Custom family: constant-in-t off-diagonal tables, row-major |A|x|A|,
  // first index = chosen action. Symmetry a_table[b][a] == a_table[a][b] is
  // required: with diagonals derived from the mixing identity, symmetric
  // off-diagonals are what keeps row sums at exactly 1 for every sigma.
  int num_actions = 0;
  std::vector<double> a_table;
  std::vector<double> b_table;

  static MonotoneParams canonical_family(double c);
  static MonotoneParams custom(int num_actions, std::vector<double> a_table,
                               std::vector<double> b_table);

  double coef_a(int from, int to, long long t) const;
  double coef_b(int from, int to, long long t) const;

  // Human-readable validation summary, including the diagonal convention in
  // force (reported, because other readings of the mixing identity exist).
  std::string validation_report() const;

 private:
  void validate() const;
};

// One realized update. `x` must already be rescaled to [0,1]; `t` is the
// recorded time the step is taken from.
std::vector<double> monotone_update(int chosen, double x, const MonotoneParams& params,
                                    std::span<const double> sigma_row, long long t);

// Exact per-action expected one-step change at sigma_row for payoffs drawn
// from env (individual 0), closed form:
//   E[d sigma(a)] = sigma(a) * sum_b B(b,a) sigma(b) * (m(a) - m(b)),
// with m the rescaled means. Matches outcome enumeration to rounding.
std::vector<double> monotone_expected_change(const MonotoneParams& params, const Environment& env,
                                             std::span<const double> sigma_row, long long t);

class MonotoneModel final : public Model {
 public:
  // env must describe one individual; sigma0 is the initial mixed action.
  MonotoneModel(MonotoneParams params, Environment env, std::vector<double> sigma0);

  int num_individuals() const override { return 1; }
  int num_actions() const override { return env_.num_actions(); }
  Configuration initial_config() const override { return Configuration::single(sigma0_); }
  // Consumes 2 uniforms per step: action device, then the chosen action's
  // payoff draw.
  void propose_into(SystemState& state, SplitMix64& rng, Configuration& proposed) const override;
  std::vector<StepOutcome> enumerate_outcomes(const SystemState& state) const override;
  const char* name() const override { return "monotone"; }

  const MonotoneParams& params() const { return params_; }
  const Environment& env() const { return env_; }

 private:
  MonotoneParams params_;
  Environment env_;
  std::vector<double> sigma0_;
};

// --- Full-information switch rules -----------------------------------------
//
// A symmetric-switch function g on payoff pairs: antisymmetric
// (g(x1,x2) = -g(x2,x1)), nondecreasing in its second argument, nonnegative
// when x2 > x1, with values in [-1,1]. Families: Linear b*(x2-x1),
// Power beta*(x2^p - x1^p) on payoffs in [0,1], or a custom table over the
// payoff support grid.
class SwitchFunction {
 public:
  enum class Kind { kLinear, kPower, kTable };

  static SwitchFunction linear(double b);
  static SwitchFunction power(double beta, double p);
  // grid: ascending payoff values; table[i*n+j] = g(grid[i], grid[j]).
  static SwitchFunction table(std::vector<double> grid, std::vector<double> values);

  Kind kind() const { return kind_; }
  double eval(double x1, double x2) const;
  // Family-specific domain checks against a payoff support (range bounds
  // for kLinear, [0,1] payoffs for kPower, grid coverage for kTable).
  void validate_on(const PayoffSupport& support) const;

 private:
  Kind kind_ = Kind::kLinear;
  double b_ = 1.0;
  double beta_ = 1.0;
  double p_ = 1.0;
  std::vector<double> grid_;
  std::vector<double> values_;
  int grid_index(double x) const;
};

// All actions' payoffs observed; mass flows between every pair weighted by
// the switch function:
//   L_a = sigma(a) * (1 + sum_{b != a} sigma(b) * g(x(b), x(a)))
std::vector<double> full_info_update(std::span<const double> payoffs, const SwitchFunction& g,
                                     std::span<const double> sigma_row);

class FullInfoModel final : public Model {
 public:
  FullInfoModel(SwitchFunction g, Environment env, std::vector<double> sigma0);

  int num_individuals() const override { return 1; }
  int num_actions() const override { return env_.num_actions(); }
  Configuration initial_config() const override { return Configuration::single(sigma0_); }
  // Consumes |A| uniforms per step (one payoff per action, action order).
  // No action-device draw: the update does not depend on the chosen action.
  void propose_into(SystemState& state, SplitMix64& rng, Configuration& proposed) const override;
  std::vector<StepOutcome> enumerate_outcomes(const SystemState& state) const override;
  const char* name() const override { return "full_info"; }

  const SwitchFunction& switch_fn() const { return g_; }
  const Environment& env() const { return env_; }

 private:
  SwitchFunction g_;
  Environment env_;
  std::vector<double> sigma0_;
};

// --- Cumulative-attraction reinforcement (Roth-Erev) ------------------------
//
// Attractions f_a > 0 accumulate obtained payoffs; the mixed action is their
// normalization. One realized step after choosing a and observing x >= 0:
//   row_out_a = (f_a + x) / (V + x),  row_out_b = f_b / (V + x),  V = sum f
//   f_out = f + x * e_a
void roth_erev_update(int chosen, double x, std::span<const double> attractions,
                      std::span<double> row_out, std::span<double> attractions_out);

// Effective per-step inertia bound theta = x_max / V; requires V > x_max so
// that theta < 1.
double roth_erev_theta(double attraction_total, double x_max);

class RothErevModel final : public Model {
 public:
  // Requires nonnegative payoffs and enough initial attraction mass:
  //   V0 > max(2*x_max^2/gap, x_max)
  // with gap the smallest optimal-vs-other mean-payoff gap. This is the
  // precondition under which the damped-convergence argument goes through.
  RothErevModel(Environment env, std::vector<double> initial_attractions);

  int num_individuals() const override { return 1; }
  int num_actions() const override { return env_.num_actions(); }
  Configuration initial_config() const override;
  std::vector<double> initial_info() const override { return f0_; }
  // Consumes 2 uniforms per step: action device, then the payoff draw.
  // state.info holds the attractions.
  void propose_into(SystemState& state, SplitMix64& rng, Configuration& proposed) const override;
  std::vector<StepOutcome> enumerate_outcomes(const SystemState& state) const override;
  const char* name() const override { return "roth_erev"; }

  const Environment& env() const { return env_; }
  double mean_gap() const { return gap_; }
  double initial_total() const { return v0_; }

 private:
  Environment env_;
  std::vector<double> f0_;
  double v0_ = 0.0;
  double gap_ = 0.0;
};

}  // namespace hazard
