#include "hazard/social.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

namespace hazard {
namespace {

constexpr double kTol = 1e-12;

double binomial(int n, int k) {
  double v = 1.0;
  for (int i = 1; i <= k; ++i) v = v * static_cast<double>(n - k + i) / static_cast<double>(i);
  return v;
}

}  // namespace

// --- ImitationRate ----------------------------------------------------------

ImitationRate ImitationRate::constant(double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw ParamError("imitation rate must lie in [0,1]");
  return ImitationRate{Kind::kConstant, lambda};
}

ImitationRate ImitationRate::harmonic() { return ImitationRate{Kind::kHarmonic, 1.0}; }

double ImitationRate::eval(long long t) const {
  if (t < 0) throw ParamError("negative time index");
  return kind == Kind::kConstant ? value : 1.0 / static_cast<double>(t + 2);
}

// --- SamplingProcess --------------------------------------------------------

SamplingProcess SamplingProcess::uniform_pairs(int num_individuals) {
  if (num_individuals < 2) throw ParamError("pair sampling needs at least 2 individuals");
  SamplingProcess s;
  s.kind_ = Kind::kUniformPairs;
  s.individuals_ = num_individuals;
  s.k_ = 1;
  s.xi_ = 1.0 / static_cast<double>(num_individuals - 1);
  return s;
}

SamplingProcess SamplingProcess::uniform_k(int num_individuals, int k) {
  if (num_individuals < 2) throw ParamError("sampling needs at least 2 individuals");
  if (k < 1 || k > num_individuals - 1) {
    throw ParamError("sample-k must draw between 1 and |W|-1 others");
  }
  SamplingProcess s;
  s.kind_ = Kind::kUniformK;
  s.individuals_ = num_individuals;
  s.k_ = k;
  s.xi_ = static_cast<double>(k) / static_cast<double>(num_individuals - 1);
  return s;
}

SamplingProcess SamplingProcess::explicit_table(
    int num_individuals, std::vector<std::pair<std::vector<int>, double>> sets) {
  if (num_individuals < 2) throw ParamError("sampling needs at least 2 individuals");
  SamplingProcess s;
  s.kind_ = Kind::kExplicit;
  s.individuals_ = num_individuals;
  s.sets_ = std::move(sets);
  s.incident_.assign(static_cast<std::size_t>(num_individuals), {});
  for (std::size_t id = 0; id < s.sets_.size(); ++id) {
    auto& [members, weight] = s.sets_[id];
    if (!(weight >= 0.0)) throw ParamError("sample-set weight must be nonnegative");
    std::sort(members.begin(), members.end());
    if (members.empty() || std::adjacent_find(members.begin(), members.end()) != members.end()) {
      throw ParamError("sample sets must be nonempty without duplicate members");
    }
    if (members.front() < 0 || members.back() >= num_individuals) {
      throw ParamError("sample-set member out of range");
    }
    for (int m : members) s.incident_[static_cast<std::size_t>(m)].push_back(static_cast<int>(id));
  }
  // The shared weighting must be a distribution from every member's side.
  for (int i = 0; i < num_individuals; ++i) {
    double total = 0.0;
    for (int id : s.incident_[static_cast<std::size_t>(i)]) total += s.sets_[id].second;
    if (std::abs(total - 1.0) > kTol) {
      throw ParamError("sample-set weights incident to individual " + std::to_string(i) +
                       " sum to " + std::to_string(total) + ", not 1");
    }
  }
  // Observability: every ordered pair must co-occur with positive probability.
  double xi = std::numeric_limits<double>::infinity();
  for (int i = 0; i < num_individuals; ++i) {
    for (int j = 0; j < num_individuals; ++j) {
      if (j == i) continue;
      double cooc = 0.0;
      for (int id : s.incident_[static_cast<std::size_t>(i)]) {
        const auto& members = s.sets_[id].first;
        if (std::binary_search(members.begin(), members.end(), j)) cooc += s.sets_[id].second;
      }
      if (!(cooc > 0.0)) {
        throw ParamError("sampling never lets individual " + std::to_string(i) + " observe " +
                         std::to_string(j));
      }
      xi = std::min(xi, cooc);
    }
  }
  s.xi_ = xi;
  return s;
}

int SamplingProcess::uniforms_per_draw() const {
  switch (kind_) {
    case Kind::kUniformPairs: return 1;
    case Kind::kUniformK: return k_;
    case Kind::kExplicit: return 1;
  }
  return 0;
}

void SamplingProcess::draw(int i, SplitMix64& rng, std::vector<int>& out) const {
  out.clear();
  switch (kind_) {
    case Kind::kUniformPairs: {
      const int others = individuals_ - 1;
      int j = static_cast<int>(rng.next_double() * others);
      if (j >= others) j = others - 1;
      if (j >= i) ++j;
      out = {std::min(i, j), std::max(i, j)};
      return;
    }
    case Kind::kUniformK: {
      std::vector<int> pool;
      pool.reserve(static_cast<std::size_t>(individuals_ - 1));
      for (int j = 0; j < individuals_; ++j) {
        if (j != i) pool.push_back(j);
      }
      const int count = static_cast<int>(pool.size());
      for (int m = 0; m < k_; ++m) {
        int pick = m + static_cast<int>(rng.next_double() * (count - m));
        if (pick >= count) pick = count - 1;
        std::swap(pool[m], pool[pick]);
      }
      out.assign(pool.begin(), pool.begin() + k_);
      out.push_back(i);
      std::sort(out.begin(), out.end());
      return;
    }
    case Kind::kExplicit: {
      const double u = rng.next_double();
      double acc = 0.0;
      int chosen = -1;
      for (int id : incident_[static_cast<std::size_t>(i)]) {
        if (sets_[id].second > 0.0) chosen = id;
        acc += sets_[id].second;
        if (u < acc) {
          out = sets_[id].first;
          return;
        }
      }
      out = sets_[chosen].first;  // rounding left u beyond the total
      return;
    }
  }
}

std::vector<std::pair<std::vector<int>, double>> SamplingProcess::enumerate(int i) const {
  if (i < 0 || i >= individuals_) throw ParamError("observer index out of range");
  std::vector<std::pair<std::vector<int>, double>> out;
  switch (kind_) {
    case Kind::kUniformPairs: {
      const double p = 1.0 / static_cast<double>(individuals_ - 1);
      for (int j = 0; j < individuals_; ++j) {
        if (j == i) continue;
        out.push_back({{std::min(i, j), std::max(i, j)}, p});
      }
      return out;
    }
    case Kind::kUniformK: {
      if (binomial(individuals_ - 1, k_) > 1e5) {
        throw UnsupportedError("sample enumeration infeasible: too many k-subsets");
      }
      std::vector<int> pool;
      for (int j = 0; j < individuals_; ++j) {
        if (j != i) pool.push_back(j);
      }
      const int count = static_cast<int>(pool.size());
      const double p = 1.0 / binomial(count, k_);
      std::vector<int> comb(static_cast<std::size_t>(k_));
      std::iota(comb.begin(), comb.end(), 0);
      while (true) {
        std::vector<int> members;
        members.reserve(static_cast<std::size_t>(k_) + 1);
        for (int c : comb) members.push_back(pool[c]);
        members.push_back(i);
        std::sort(members.begin(), members.end());
        out.push_back({std::move(members), p});
        int m = k_ - 1;
        while (m >= 0 && comb[m] == count - k_ + m) --m;
        if (m < 0) break;
        ++comb[m];
        for (int j = m + 1; j < k_; ++j) comb[j] = comb[j - 1] + 1;
      }
      return out;
    }
    case Kind::kExplicit: {
      for (int id : incident_[static_cast<std::size_t>(i)]) {
        if (sets_[id].second > 0.0) out.push_back(sets_[id]);
      }
      return out;
    }
  }
  return out;
}

std::vector<int> SamplingProcess::sample_sizes() const {
  switch (kind_) {
    case Kind::kUniformPairs: return {2};
    case Kind::kUniformK: return {k_ + 1};
    case Kind::kExplicit: {
      std::set<int> sizes;
      for (const auto& [members, weight] : sets_) {
        if (weight > 0.0) sizes.insert(static_cast<int>(members.size()));
      }
      return {sizes.begin(), sizes.end()};
    }
  }
  return {};
}

// --- ImitationComponent -----------------------------------------------------

ImitationComponent ImitationComponent::proportional() {
  ImitationComponent c;
  c.kind_ = Kind::kProportional;
  return c;
}

ImitationComponent ImitationComponent::normalized_score(double q) {
  if (!(q > 0.0)) throw ParamError("score exponent must be positive");
  ImitationComponent c;
  c.kind_ = Kind::kNormalizedScore;
  c.q_ = q;
  return c;
}

ImitationComponent ImitationComponent::linear_pairwise(double b) {
  if (!(b >= 0.0)) throw ParamError("pairwise slope must be nonnegative");
  ImitationComponent c;
  c.kind_ = Kind::kLinearPairwise;
  c.b_ = b;
  return c;
}

void ImitationComponent::validate_on(const PayoffSupport& support) const {
  switch (kind_) {
    case Kind::kProportional:
      if (!(support.x_min >= 0.0 && support.x_max > 0.0)) {
        throw ParamError("proportional imitation needs payoffs in [0, x_max] with x_max > 0");
      }
      return;
    case Kind::kNormalizedScore:
      if (!(support.x_min >= 0.0)) {
        throw ParamError("score-based imitation needs nonnegative payoffs");
      }
      return;
    case Kind::kLinearPairwise:
      if (!(b_ * support.range() <= 1.0 + kTol)) {
        throw ParamError("pairwise slope times payoff range exceeds 1");
      }
      return;
  }
}

void ImitationComponent::weights(std::span<const double> payoffs, int self,
                                 const PayoffSupport& support, std::span<double> out) const {
  const int n = static_cast<int>(payoffs.size());
  if (self < 0 || self >= n) throw ParamError("self index out of range");
  if (static_cast<int>(out.size()) != n) throw ParamError("output span size mismatch");
  if (n == 1) {
    out[0] = 1.0;
    return;
  }
  switch (kind_) {
    case Kind::kProportional: {
      double rest = 0.0;
      for (int j = 0; j < n; ++j) {
        if (j == self) continue;
        out[j] = payoffs[j] / (static_cast<double>(n) * support.x_max);
        rest += out[j];
      }
      out[self] = 1.0 - rest;
      return;
    }
    case Kind::kNormalizedScore: {
      double total = 0.0;
      for (int j = 0; j < n; ++j) {
        out[j] = std::pow(payoffs[j], q_);
        total += out[j];
      }
      if (total == 0.0) {
        for (int j = 0; j < n; ++j) out[j] = 1.0 / static_cast<double>(n);
      } else {
        for (int j = 0; j < n; ++j) out[j] /= total;
      }
      return;
    }
    case Kind::kLinearPairwise: {
      double rest = 0.0;
      for (int j = 0; j < n; ++j) {
        if (j == self) continue;
        const double d = payoffs[j] - payoffs[self];
        out[j] = d > 0.0 ? b_ * d / static_cast<double>(n - 1) : 0.0;
        rest += out[j];
      }
      out[self] = 1.0 - rest;
      return;
    }
  }
}

// --- Updates ----------------------------------------------------------------

std::vector<double> imitation_probs(const ImitationComponent& comp,
                                    std::span<const int> member_actions,
                                    std::span<const double> member_payoffs, int self,
                                    const PayoffSupport& support, int num_actions) {
  const int n = static_cast<int>(member_actions.size());
  if (static_cast<int>(member_payoffs.size()) != n) throw ParamError("member span size mismatch");
  std::vector<double> w(static_cast<std::size_t>(n));
  comp.weights(member_payoffs, self, support, w);
  std::vector<double> mass(static_cast<std::size_t>(num_actions), 0.0);
  for (int j = 0; j < n; ++j) {
    const int a = member_actions[j];
    if (a < 0 || a >= num_actions) throw ParamError("member action out of range");
    mass[static_cast<std::size_t>(a)] += w[j];
  }
  return mass;
}

std::vector<double> behavioral_update(const ImitationComponent& comp,
                                      std::span<const int> member_actions,
                                      std::span<const double> member_payoffs, int self,
                                      double lambda, std::span<const double> sigma_row,
                                      const PayoffSupport& support) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw ParamError("imitation rate must lie in [0,1]");
  const int num_actions = static_cast<int>(sigma_row.size());
  const auto mass =
      imitation_probs(comp, member_actions, member_payoffs, self, support, num_actions);
  std::vector<double> out(static_cast<std::size_t>(num_actions));
  for (int a = 0; a < num_actions; ++a) {
    out[a] = lambda * mass[a] + (1.0 - lambda) * sigma_row[a];
  }
  return out;
}

void population_step(const Configuration& config, const ImitationComponent& comp,
                     const SamplingProcess& sampling, double lambda, const Environment& env,
                     SplitMix64& rng, Configuration& proposed) {
  const int W = config.num_individuals();
  if (env.num_individuals() != W || sampling.num_individuals() != W) {
    throw ConfigError("population size mismatch between configuration, environment, and sampling");
  }
  std::vector<int> actions(static_cast<std::size_t>(W));
  for (int i = 0; i < W; ++i) actions[i] = choose_action(config.row(i), rng.next_double());
  std::vector<double> payoffs(static_cast<std::size_t>(W));
  for (int i = 0; i < W; ++i) payoffs[i] = env.draw(i, actions[i], rng);

  std::vector<int> sample;
  std::vector<int> s_actions;
  std::vector<double> s_payoffs;
  for (int i = 0; i < W; ++i) {
    sampling.draw(i, rng, sample);
    const int n = static_cast<int>(sample.size());
    s_actions.resize(static_cast<std::size_t>(n));
    s_payoffs.resize(static_cast<std::size_t>(n));
    int self = -1;
    for (int j = 0; j < n; ++j) {
      s_actions[j] = actions[sample[j]];
      s_payoffs[j] = payoffs[sample[j]];
      if (sample[j] == i) self = j;
    }
    const auto row = behavioral_update(comp, s_actions, s_payoffs, self, lambda, config.row(i),
                                       env.support());
    std::copy(row.begin(), row.end(), proposed.row(i).begin());
  }
}

// --- SocialModel ------------------------------------------------------------

SocialModel::SocialModel(Environment env, ImitationComponent comp, SamplingProcess sampling,
                         ImitationRate rate, Configuration sigma0)
    : env_(std::move(env)),
      comp_(std::move(comp)),
      sampling_(std::move(sampling)),
      rate_(rate),
      sigma0_(std::move(sigma0)) {
  const int W = env_.num_individuals();
  if (W < 2) throw ParamError("social learning needs at least 2 individuals");
  if (sampling_.num_individuals() != W) {
    throw ParamError("sampling population size does not match the environment");
  }
  if (sigma0_.num_individuals() != W || sigma0_.num_actions() != env_.num_actions()) {
    throw ParamError("initial configuration shape does not match the environment");
  }
  comp_.validate_on(env_.support());
}

void SocialModel::propose_into(SystemState& state, SplitMix64& rng,
                               Configuration& proposed) const {
  population_step(state.config, comp_, sampling_, rate_.eval(state.t), env_, rng, proposed);
}

std::vector<StepOutcome> SocialModel::enumerate_outcomes(const SystemState& state) const {
  const int W = env_.num_individuals();
  const int A = env_.num_actions();
  const double lambda = rate_.eval(state.t);

  // Per-individual (action, payoff) events with positive probability.
  struct Event {
    int action;
    double payoff;
    double prob;
  };
  std::vector<std::vector<Event>> events(static_cast<std::size_t>(W));
  std::vector<std::vector<std::pair<std::vector<int>, double>>> samples(
      static_cast<std::size_t>(W));
  double count = 1.0;
  for (int i = 0; i < W; ++i) {
    const auto row = state.config.row(i);
    for (int a = 0; a < A; ++a) {
      if (!(row[a] > 0.0)) continue;
      for (const auto& [value, prob] : env_.dist(i, a).atoms) {
        if (prob > 0.0) events[i].push_back({a, value, row[a] * prob});
      }
    }
    samples[i] = sampling_.enumerate(i);
    count *= static_cast<double>(events[i].size()) * static_cast<double>(samples[i].size());
    if (count > 2e6) {
      throw UnsupportedError("social outcome enumeration infeasible: joint outcome count "
                             "exceeds 2e6");
    }
  }

  std::vector<std::size_t> e_idx(static_cast<std::size_t>(W), 0);
  std::vector<std::size_t> s_idx(static_cast<std::size_t>(W), 0);
  std::vector<int> actions(static_cast<std::size_t>(W));
  std::vector<double> payoffs(static_cast<std::size_t>(W));
  std::vector<int> s_actions;
  std::vector<double> s_payoffs;
  std::vector<StepOutcome> out;
  out.reserve(static_cast<std::size_t>(count));
  while (true) {
    double prob = 1.0;
    for (int i = 0; i < W; ++i) {
      const Event& e = events[i][e_idx[i]];
      actions[i] = e.action;
      payoffs[i] = e.payoff;
      prob *= e.prob;
    }
    for (int i = 0; i < W; ++i) prob *= samples[i][s_idx[i]].second;

    StepOutcome o;
    o.prob = prob;
    o.proposed = Configuration::zeros(W, A);
    for (int i = 0; i < W; ++i) {
      const auto& members = samples[i][s_idx[i]].first;
      const int n = static_cast<int>(members.size());
      s_actions.resize(static_cast<std::size_t>(n));
      s_payoffs.resize(static_cast<std::size_t>(n));
      int self = -1;
      for (int j = 0; j < n; ++j) {
        s_actions[j] = actions[members[j]];
        s_payoffs[j] = payoffs[members[j]];
        if (members[j] == i) self = j;
      }
      const auto row = behavioral_update(comp_, s_actions, s_payoffs, self, lambda,
                                         state.config.row(i), env_.support());
      std::copy(row.begin(), row.end(), o.proposed.row(i).begin());
    }
    out.push_back(std::move(o));

    // Odometer over sample indices first, then event indices.
    int d = W - 1;
    while (d >= 0 && ++s_idx[d] == samples[d].size()) s_idx[d--] = 0;
    if (d >= 0) continue;
    d = W - 1;
    while (d >= 0 && ++e_idx[d] == events[d].size()) e_idx[d--] = 0;
    if (d < 0) break;
  }
  return out;
}

// --- Exact floors -----------------------------------------------------------

double delta_tilde_exact(const ImitationComponent& comp, const Environment& env,
                         int sample_size) {
  if (!env.identical_across_individuals()) {
    throw ParamError("the net-attraction floor assumes identical payoff distributions "
                     "across individuals");
  }
  const int n = sample_size;
  if (n < 2) throw ParamError("net-attraction floor needs sample size >= 2");
  const int A = env.num_actions();
  std::size_t atom_tuples = 1;
  std::size_t assignments = 1;
  for (int m = 0; m < n; ++m) {
    std::size_t most = 0;
    for (int a = 0; a < A; ++a) most = std::max(most, env.dist(0, a).atoms.size());
    atom_tuples *= most;
    if (m >= 2) assignments *= static_cast<std::size_t>(A);
    if (atom_tuples > 200000 || assignments > 10000) {
      throw UnsupportedError("net-attraction floor enumeration infeasible for this sample size");
    }
  }

  const OptimalSet optimal = optimal_set_expected(env);
  const auto& best = optimal.of(0);
  std::vector<int> rest;
  for (int a = 0; a < A; ++a) {
    if (std::find(best.begin(), best.end(), a) == best.end()) rest.push_back(a);
  }

  // Member 0 plays the optimal action, member 1 the non-optimal one; the
  // remaining n-2 members range over every action profile.
  std::vector<int> assign(static_cast<std::size_t>(n));
  std::vector<std::size_t> atom_idx(static_cast<std::size_t>(n));
  std::vector<double> payoffs(static_cast<std::size_t>(n));
  std::vector<double> w(static_cast<std::size_t>(n));
  double floor = std::numeric_limits<double>::infinity();
  for (int ai : best) {
    for (int aj : rest) {
      assign[0] = ai;
      assign[1] = aj;
      std::fill(assign.begin() + 2, assign.end(), 0);
      while (true) {
        // Expectation over the members' payoff draws for this assignment.
        std::fill(atom_idx.begin(), atom_idx.end(), 0);
        double expectation = 0.0;
        while (true) {
          double prob = 1.0;
          for (int m = 0; m < n; ++m) {
            const auto& atom = env.dist(0, assign[m]).atoms[atom_idx[m]];
            payoffs[m] = atom.first;
            prob *= atom.second;
          }
          if (prob > 0.0) {
            comp.weights(payoffs, 1, env.support(), w);
            const double toward_optimal = w[0];  // j's view: weight on i
            comp.weights(payoffs, 0, env.support(), w);
            const double toward_other = w[1];  // i's view: weight on j
            expectation += prob * (toward_optimal - toward_other);
          }
          int m = n - 1;
          while (m >= 0 && ++atom_idx[m] == env.dist(0, assign[m]).atoms.size()) atom_idx[m--] = 0;
          if (m < 0) break;
        }
        floor = std::min(floor, expectation);

        int m = n - 1;
        while (m >= 2 && ++assign[m] == A) assign[m--] = 0;
        if (m < 2) break;
      }
    }
  }
  return floor;
}

SocialWberhrPoint wberhr_social_exact(const SocialModel& model, const OptimalSet& optimal,
                                      const Configuration& config, long long t) {
  SystemState state;
  state.t = t;
  state.config = config;
  state.info = model.initial_info();
  const auto outcomes = model.enumerate_outcomes(state);

  SocialWberhrPoint point;
  point.performance = aggregate(config, optimal);
  double expected = 0.0;
  for (const auto& o : outcomes) expected += o.prob * aggregate(o.proposed, optimal);
  point.gain = expected - point.performance;

  const DeltaModel dm =
      DeltaModel::social(model.component(), model.sampling(), model.rate());
  point.delta = delta_lower_bound(model.env(), dm, t);
  point.bound = point.delta * point.performance * (1.0 - point.performance);
  point.slack = point.gain - point.bound;
  point.holds = point.slack >= -1e-12;
  return point;
}

}  // namespace hazard
