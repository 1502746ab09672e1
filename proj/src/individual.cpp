#include "hazard/individual.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace hazard {
namespace {

constexpr double kTol = 1e-12;

double rescale(double x, const PayoffSupport& s) { return (x - s.x_min) / s.range(); }

void check_single_individual(const Environment& env, const char* what) {
  if (env.num_individuals() != 1) {
    throw ParamError(std::string(what) + " is a single-individual rule; environment has " +
                     std::to_string(env.num_individuals()) + " individuals");
  }
  if (env.num_actions() < 2) throw ParamError(std::string(what) + " needs at least 2 actions");
}

}  // namespace

// --- MonotoneParams ---------------------------------------------------------

MonotoneParams MonotoneParams::canonical_family(double c) {
  if (!(c > 0.0 && c <= 1.0)) throw ParamError("canonical monotone family needs c in (0,1]");
  MonotoneParams p;
  p.canonical = true;
  p.c = c;
  return p;
}

MonotoneParams MonotoneParams::custom(int num_actions, std::vector<double> a_table,
                                      std::vector<double> b_table) {
  MonotoneParams p;
  p.canonical = false;
  p.num_actions = num_actions;
  p.a_table = std::move(a_table);
  p.b_table = std::move(b_table);
  p.validate();
  return p;
}

void MonotoneParams::validate() const {
  const int n = num_actions;
  if (n < 2) throw ParamError("custom monotone tables need at least 2 actions");
  const auto sz = static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
  if (a_table.size() != sz || b_table.size() != sz) {
    throw ParamError("custom monotone tables must be num_actions x num_actions");
  }
  for (int b = 0; b < n; ++b) {
    for (int a = 0; a < n; ++a) {
      const double av = a_table[static_cast<std::size_t>(b) * n + a];
      const double bv = b_table[static_cast<std::size_t>(b) * n + a];
      if (b == a) {
        // Diagonals are derived from the current mixture at update time;
        // stored diagonal entries would be dead weight, so require zero.
        if (av != 0.0 || bv != 0.0) {
          throw ParamError("custom monotone tables derive their diagonals; set table diagonal "
                           "entries to 0 (action " + std::to_string(a) + ")");
        }
        continue;
      }
      if (!(av >= 0.0 && av <= 1.0)) {
        throw ParamError("monotone base coefficient out of [0,1] at pair (" + std::to_string(b) +
                         "," + std::to_string(a) + ")");
      }
      if (!(bv >= 0.0)) {
        throw ParamError("monotone payoff coefficient negative at pair (" + std::to_string(b) +
                         "," + std::to_string(a) + ")");
      }
      if (!(av + bv <= 1.0 + kTol)) {
        throw ParamError("monotone coefficients need A + B <= 1 (rescaled payoffs), violated at "
                         "pair (" + std::to_string(b) + "," + std::to_string(a) + ")");
      }
      const double a_sym = a_table[static_cast<std::size_t>(a) * n + b];
      const double b_sym = b_table[static_cast<std::size_t>(a) * n + b];
      if (std::abs(av - a_sym) > kTol || std::abs(bv - b_sym) > kTol) {
        throw ParamError("custom monotone tables must be symmetric; asymmetric at pair (" +
                         std::to_string(b) + "," + std::to_string(a) + ")");
      }
    }
  }
  // Cross-mixing: mass must be able to flow across every bipartition, which
  // for a symmetric payoff table is connectivity of the B > 0 graph.
  std::vector<int> seen(static_cast<std::size_t>(n), 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  while (!stack.empty()) {
    const int b = stack.back();
    stack.pop_back();
    for (int a = 0; a < n; ++a) {
      if (a == b || seen[a]) continue;
      if (b_table[static_cast<std::size_t>(b) * n + a] > 0.0) {
        seen[a] = 1;
        stack.push_back(a);
      }
    }
  }
  for (int a = 0; a < n; ++a) {
    if (!seen[a]) {
      throw ParamError("custom monotone payoff coefficients leave action " + std::to_string(a) +
                       " disconnected; some bipartition has no positive cross term");
    }
  }
}

double MonotoneParams::coef_a(int from, int to, long long t) const {
  if (canonical) return (1.0 - c) / static_cast<double>(t + 1);
  return a_table[static_cast<std::size_t>(from) * num_actions + to];
}

double MonotoneParams::coef_b(int from, int to, long long t) const {
  if (canonical) return c / static_cast<double>(t + 1);
  return b_table[static_cast<std::size_t>(from) * num_actions + to];
}

std::string MonotoneParams::validation_report() const {
  std::ostringstream os;
  if (canonical) {
    os << "monotone canonical family: A(b,a) = (1-c)/(t+1), B(b,a) = c/(t+1), c = " << c
       << " (both indices, diagonal included)\n";
  } else {
    os << "monotone custom tables: " << num_actions << " actions, constant in t, symmetric "
       << "off-diagonals, A in [0,1], B >= 0, A + B <= 1, cross-mixing connected\n";
  }
  os << "diagonal convention: A(a,a) = sum_{c != a} sigma(c) A(c,a) / (1 - sigma(a)) with "
     << "current-mixture weights (the chosen action's gain is the sigma-mixture of the column's "
     << "losses), same for B\n";
  return os.str();
}

// --- Monotone update --------------------------------------------------------

std::vector<double> monotone_update(int chosen, double x, const MonotoneParams& params,
                                    std::span<const double> sigma_row, long long t) {
  const int n = static_cast<int>(sigma_row.size());
  if (chosen < 0 || chosen >= n) throw ParamError("chosen action out of range");
  if (!(x >= -kTol && x <= 1.0 + kTol)) {
    throw ParamError("monotone update takes payoffs rescaled to [0,1]");
  }
  if (t < 0) throw ParamError("negative time index");
  if (!params.canonical && params.num_actions != n) {
    throw ParamError("monotone table size does not match the action count");
  }

  std::vector<double> out(static_cast<std::size_t>(n));
  if (params.canonical) {
    const double a_coef = (1.0 - params.c) / static_cast<double>(t + 1);
    const double b_coef = params.c / static_cast<double>(t + 1);
    const double g = a_coef + b_coef * x;
    for (int a = 0; a < n; ++a) {
      out[a] = (a == chosen) ? sigma_row[a] + (1.0 - sigma_row[a]) * g
                             : sigma_row[a] * (1.0 - g);
    }
  } else {
    // Derived diagonal: the (1 - sigma(chosen)) factors cancel, leaving the
    // gain as the sigma-weighted sum of the column's loss coefficients.
    double gain = 0.0;
    for (int c = 0; c < n; ++c) {
      if (c == chosen) continue;
      const double g = params.coef_a(c, chosen, t) + params.coef_b(c, chosen, t) * x;
      gain += sigma_row[c] * g;
    }
    for (int a = 0; a < n; ++a) {
      if (a == chosen) {
        out[a] = sigma_row[a] + gain;
      } else {
        const double g = params.coef_a(chosen, a, t) + params.coef_b(chosen, a, t) * x;
        out[a] = sigma_row[a] * (1.0 - g);
      }
    }
  }
  return out;
}

std::vector<double> monotone_expected_change(const MonotoneParams& params, const Environment& env,
                                             std::span<const double> sigma_row, long long t) {
  check_single_individual(env, "monotone_expected_change");
  const int n = env.num_actions();
  if (static_cast<int>(sigma_row.size()) != n) throw ParamError("sigma row size mismatch");
  std::vector<double> m(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a) m[a] = rescale(env.mean(0, a), env.support());

  std::vector<double> out(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a) {
    double acc = 0.0;
    for (int b = 0; b < n; ++b) {
      if (b == a) continue;
      acc += params.coef_b(b, a, t) * sigma_row[b] * (m[a] - m[b]);
    }
    out[a] = sigma_row[a] * acc;
  }
  return out;
}

// --- MonotoneModel ----------------------------------------------------------

MonotoneModel::MonotoneModel(MonotoneParams params, Environment env, std::vector<double> sigma0)
    : params_(std::move(params)), env_(std::move(env)), sigma0_(std::move(sigma0)) {
  check_single_individual(env_, "MonotoneModel");
  if (!params_.canonical && params_.num_actions != env_.num_actions()) {
    throw ParamError("monotone table size does not match the environment's action count");
  }
  if (static_cast<int>(sigma0_.size()) != env_.num_actions()) {
    throw ParamError("initial mixed action size does not match the action count");
  }
  (void)Configuration::single(sigma0_);  // validates entries and normalization
}

void MonotoneModel::propose_into(SystemState& state, SplitMix64& rng,
                                 Configuration& proposed) const {
  const auto row = state.config.row(0);
  const int chosen = choose_action(row, rng.next_double());
  const double x_raw = env_.dist(0, chosen).draw_from_uniform(rng.next_double());
  const auto updated = monotone_update(chosen, rescale(x_raw, env_.support()), params_, row, state.t);
  std::copy(updated.begin(), updated.end(), proposed.row(0).begin());
}

std::vector<StepOutcome> MonotoneModel::enumerate_outcomes(const SystemState& state) const {
  const auto row = state.config.row(0);
  std::vector<StepOutcome> out;
  for (int chosen = 0; chosen < env_.num_actions(); ++chosen) {
    const double p_choice = row[chosen];
    if (!(p_choice > 0.0)) continue;
    for (const auto& [value, prob] : env_.dist(0, chosen).atoms) {
      if (!(prob > 0.0)) continue;
      StepOutcome o;
      o.prob = p_choice * prob;
      o.proposed = Configuration::single(
          monotone_update(chosen, rescale(value, env_.support()), params_, row, state.t));
      out.push_back(std::move(o));
    }
  }
  return out;
}

// --- SwitchFunction ---------------------------------------------------------

SwitchFunction SwitchFunction::linear(double b) {
  if (!(b >= 0.0)) throw ParamError("linear switch slope must be nonnegative");
  SwitchFunction g;
  g.kind_ = Kind::kLinear;
  g.b_ = b;
  return g;
}

SwitchFunction SwitchFunction::power(double beta, double p) {
  if (!(beta >= 0.0 && beta <= 1.0)) throw ParamError("power switch scale must lie in [0,1]");
  if (!(p > 0.0)) throw ParamError("power switch exponent must be positive");
  SwitchFunction g;
  g.kind_ = Kind::kPower;
  g.beta_ = beta;
  g.p_ = p;
  return g;
}

SwitchFunction SwitchFunction::table(std::vector<double> grid, std::vector<double> values) {
  SwitchFunction g;
  g.kind_ = Kind::kTable;
  g.grid_ = std::move(grid);
  g.values_ = std::move(values);
  const int n = static_cast<int>(g.grid_.size());
  if (n < 2) throw ParamError("switch table needs at least 2 grid points");
  for (int i = 1; i < n; ++i) {
    if (!(g.grid_[i - 1] < g.grid_[i])) throw ParamError("switch table grid must be strictly ascending");
  }
  if (g.values_.size() != static_cast<std::size_t>(n) * n) {
    throw ParamError("switch table values must be grid x grid");
  }
  auto at = [&](int i, int j) { return g.values_[static_cast<std::size_t>(i) * n + j]; };
  auto point = [&](int i, int j) {
    std::ostringstream os;
    os << "(x1=" << g.grid_[i] << ", x2=" << g.grid_[j] << ")";
    return os.str();
  };
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double v = at(i, j);
      if (!(v >= -1.0 - kTol && v <= 1.0 + kTol)) {
        throw ParamError("switch table value outside [-1,1] at " + point(i, j));
      }
      if (std::abs(v + at(j, i)) > kTol) {
        throw ParamError("switch table breaks antisymmetry at " + point(i, j));
      }
      if (j > i && !(v >= -kTol)) {
        throw ParamError("switch table negative on an improving pair at " + point(i, j));
      }
      if (j > 0 && at(i, j) + kTol < at(i, j - 1)) {
        throw ParamError("switch table not nondecreasing in its second argument at " + point(i, j));
      }
    }
  }
  return g;
}

int SwitchFunction::grid_index(double x) const {
  const auto it = std::lower_bound(grid_.begin(), grid_.end(), x - kTol);
  if (it != grid_.end() && std::abs(*it - x) <= kTol) {
    return static_cast<int>(it - grid_.begin());
  }
  std::ostringstream os;
  os << "payoff " << x << " is not on the switch-table grid";
  throw ParamError(os.str());
}

double SwitchFunction::eval(double x1, double x2) const {
  switch (kind_) {
    case Kind::kLinear:
      return b_ * (x2 - x1);
    case Kind::kPower:
      return beta_ * (std::pow(x2, p_) - std::pow(x1, p_));
    case Kind::kTable: {
      const int n = static_cast<int>(grid_.size());
      return values_[static_cast<std::size_t>(grid_index(x1)) * n + grid_index(x2)];
    }
  }
  throw ParamError("unknown switch function kind");
}

void SwitchFunction::validate_on(const PayoffSupport& support) const {
  switch (kind_) {
    case Kind::kLinear:
      if (!(b_ * support.range() <= 1.0 + kTol)) {
        throw ParamError("linear switch slope times payoff range exceeds 1");
      }
      return;
    case Kind::kPower:
      if (!(support.x_min >= -kTol && support.x_max <= 1.0 + kTol)) {
        throw ParamError("power switch functions need payoffs inside [0,1]");
      }
      return;
    case Kind::kTable:
      if (!(grid_.front() >= support.x_min - kTol && grid_.back() <= support.x_max + kTol)) {
        throw ParamError("switch table grid extends outside the payoff support");
      }
      return;
  }
}

// --- Full-information update ------------------------------------------------

std::vector<double> full_info_update(std::span<const double> payoffs, const SwitchFunction& g,
                                     std::span<const double> sigma_row) {
  const int n = static_cast<int>(sigma_row.size());
  if (static_cast<int>(payoffs.size()) != n) throw ParamError("one payoff per action required");
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a) {
    double flow = 0.0;
    for (int b = 0; b < n; ++b) {
      if (b == a) continue;
      flow += sigma_row[b] * g.eval(payoffs[b], payoffs[a]);
    }
    out[a] = sigma_row[a] * (1.0 + flow);
  }
  return out;
}

// --- FullInfoModel ----------------------------------------------------------

FullInfoModel::FullInfoModel(SwitchFunction g, Environment env, std::vector<double> sigma0)
    : g_(std::move(g)), env_(std::move(env)), sigma0_(std::move(sigma0)) {
  check_single_individual(env_, "FullInfoModel");
  if (static_cast<int>(sigma0_.size()) != env_.num_actions()) {
    throw ParamError("initial mixed action size does not match the action count");
  }
  g_.validate_on(env_.support());
  (void)Configuration::single(sigma0_);
}

void FullInfoModel::propose_into(SystemState& state, SplitMix64& rng,
                                 Configuration& proposed) const {
  const auto row = state.config.row(0);
  const int n = env_.num_actions();
  std::vector<double> payoffs(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a) payoffs[a] = env_.dist(0, a).draw_from_uniform(rng.next_double());
  const auto updated = full_info_update(payoffs, g_, row);
  std::copy(updated.begin(), updated.end(), proposed.row(0).begin());
}

std::vector<StepOutcome> FullInfoModel::enumerate_outcomes(const SystemState& state) const {
  const auto row = state.config.row(0);
  const int n = env_.num_actions();
  std::size_t count = 1;
  for (int a = 0; a < n; ++a) {
    count *= env_.dist(0, a).atoms.size();
    if (count > 4096) {
      throw UnsupportedError("full-information outcome enumeration infeasible: payoff tuple "
                             "count exceeds 4096");
    }
  }
  std::vector<StepOutcome> out;
  std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
  std::vector<double> payoffs(static_cast<std::size_t>(n));
  while (true) {
    double prob = 1.0;
    for (int a = 0; a < n; ++a) {
      const auto& atom = env_.dist(0, a).atoms[idx[a]];
      payoffs[a] = atom.first;
      prob *= atom.second;
    }
    if (prob > 0.0) {
      StepOutcome o;
      o.prob = prob;
      o.proposed = Configuration::single(full_info_update(payoffs, g_, row));
      out.push_back(std::move(o));
    }
    int a = n - 1;
    while (a >= 0 && ++idx[a] == env_.dist(0, a).atoms.size()) idx[a--] = 0;
    if (a < 0) break;
  }
  return out;
}

// --- Roth-Erev --------------------------------------------------------------

void roth_erev_update(int chosen, double x, std::span<const double> attractions,
                      std::span<double> row_out, std::span<double> attractions_out) {
  const int n = static_cast<int>(attractions.size());
  if (chosen < 0 || chosen >= n) throw ParamError("chosen action out of range");
  if (!(x >= 0.0)) throw ParamError("cumulative reinforcement needs nonnegative payoffs");
  if (static_cast<int>(row_out.size()) != n || static_cast<int>(attractions_out.size()) != n) {
    throw ParamError("output span size mismatch");
  }
  double total = 0.0;
  for (int a = 0; a < n; ++a) {
    if (!(attractions[a] > 0.0)) throw ParamError("attractions must stay positive");
    total += attractions[a];
  }
  const double denom = total + x;
  for (int a = 0; a < n; ++a) {
    row_out[a] = ((a == chosen) ? attractions[a] + x : attractions[a]) / denom;
  }
  if (attractions_out.data() != attractions.data()) {
    std::copy(attractions.begin(), attractions.end(), attractions_out.begin());
  }
  attractions_out[chosen] += x;
}

double roth_erev_theta(double attraction_total, double x_max) {
  if (!(attraction_total > x_max)) {
    throw ParamError("attraction total must exceed the payoff bound for the inertia rate");
  }
  return x_max / attraction_total;
}

RothErevModel::RothErevModel(Environment env, std::vector<double> initial_attractions)
    : env_(std::move(env)), f0_(std::move(initial_attractions)) {
  check_single_individual(env_, "RothErevModel");
  if (!(env_.support().x_min >= 0.0)) {
    throw ParamError("cumulative reinforcement needs a nonnegative payoff support");
  }
  if (static_cast<int>(f0_.size()) != env_.num_actions()) {
    throw ParamError("one initial attraction per action required");
  }
  for (double f : f0_) {
    if (!(f > 0.0)) throw ParamError("initial attractions must be positive");
  }
  v0_ = std::accumulate(f0_.begin(), f0_.end(), 0.0);

  const OptimalSet optimal = optimal_set_expected(env_);
  const auto& best = optimal.of(0);
  gap_ = std::numeric_limits<double>::infinity();
  for (int a : best) {
    for (int b = 0; b < env_.num_actions(); ++b) {
      if (std::find(best.begin(), best.end(), b) != best.end()) continue;
      gap_ = std::min(gap_, env_.mean(0, a) - env_.mean(0, b));
    }
  }
  const double x_max = env_.support().x_max;
  const double needed = std::max(2.0 * x_max * x_max / gap_, x_max);
  if (!(v0_ > needed)) {
    std::ostringstream os;
    os << "initial attraction mass " << v0_ << " too small: need V0 > " << needed
       << " (= max(2*x_max^2/gap, x_max) with gap " << gap_ << ")";
    throw ParamError(os.str());
  }
}

Configuration RothErevModel::initial_config() const {
  std::vector<double> row(f0_.size());
  for (std::size_t a = 0; a < f0_.size(); ++a) row[a] = f0_[a] / v0_;
  return Configuration::single(std::move(row));
}

void RothErevModel::propose_into(SystemState& state, SplitMix64& rng,
                                 Configuration& proposed) const {
  const auto row = state.config.row(0);
  const int chosen = choose_action(row, rng.next_double());
  const double x = env_.dist(0, chosen).draw_from_uniform(rng.next_double());
  roth_erev_update(chosen, x, state.info, proposed.row(0), state.info);
}

std::vector<StepOutcome> RothErevModel::enumerate_outcomes(const SystemState& state) const {
  const auto row = state.config.row(0);
  const int n = env_.num_actions();
  if (static_cast<int>(state.info.size()) != n) {
    throw ParamError("attraction state size mismatch");
  }
  std::vector<StepOutcome> out;
  std::vector<double> row_buf(static_cast<std::size_t>(n));
  std::vector<double> f_buf(static_cast<std::size_t>(n));
  for (int chosen = 0; chosen < n; ++chosen) {
    const double p_choice = row[chosen];
    if (!(p_choice > 0.0)) continue;
    for (const auto& [value, prob] : env_.dist(0, chosen).atoms) {
      if (!(prob > 0.0)) continue;
      roth_erev_update(chosen, value, state.info, row_buf, f_buf);
      StepOutcome o;
      o.prob = p_choice * prob;
      o.proposed = Configuration::single(row_buf);
      out.push_back(std::move(o));
    }
  }
  return out;
}

}  // namespace hazard
