#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hazard/errors.hpp"

namespace hazard {

// Tolerance for row sums and for clamping rounding-level negative entries.
// Anything further off the simplex is a hard error, never silently fixed.
inline constexpr double kSimplexTol = 1e-12;

// Canonical row cleanup, used after every state update (scalar engine and
// batch kernels mirror this exactly):
//   1. entry < -tol            -> invariant breach
//   2. entry in [-tol, 0)      -> 0   (written as (c <= 0 ? 0 : c) so that
//                                      -0.0 maps to +0.0, matching vmaxpd)
//   3. |sum - 1| > tol         -> invariant breach
//   4. divide row by sum       (x/1.0 == x, so exact rows pass untouched)
// Returns false on breach instead of throwing; hot paths attach step/seed
// context themselves.
inline bool normalize_row(std::span<double> row) {
  double sum = 0.0;
  for (double& c : row) {
    if (!(c >= -kSimplexTol)) return false;  // also catches NaN
    c = (c <= 0.0) ? 0.0 : c;
    sum += c;
  }
  double off = sum - 1.0;
  if (off < 0.0) off = -off;
  if (!(off <= kSimplexTol)) return false;
  for (double& c : row) c /= sum;
  return true;
}

// Product-of-simplices state: one mixed action (row of length num_actions)
// per individual, stored flat in individual-major order.
class Configuration {
 public:
  Configuration() = default;

  // Validating constructor: every entry in [0,1] up to tolerance, every row
  // normalized. Use for external input; the engine mutates rows in place.
  Configuration(int num_individuals, int num_actions, std::vector<double> entries);

  // Single-individual convenience.
  static Configuration single(std::vector<double> row) {
    const int n = static_cast<int>(row.size());  // before the move below
    return Configuration(1, n, std::move(row));
  }

  // Uniform-size container without validation (engine scratch).
  static Configuration zeros(int num_individuals, int num_actions) {
    Configuration c;
    c.individuals_ = num_individuals;
    c.actions_ = num_actions;
    c.data_.assign(static_cast<std::size_t>(num_individuals) * num_actions, 0.0);
    return c;
  }

  int num_individuals() const { return individuals_; }
  int num_actions() const { return actions_; }

  std::span<double> row(int i) {
    return {data_.data() + static_cast<std::size_t>(i) * actions_, static_cast<std::size_t>(actions_)};
  }
  std::span<const double> row(int i) const {
    return {data_.data() + static_cast<std::size_t>(i) * actions_, static_cast<std::size_t>(actions_)};
  }
  double operator()(int i, int a) const { return data_[static_cast<std::size_t>(i) * actions_ + a]; }
  double& operator()(int i, int a) { return data_[static_cast<std::size_t>(i) * actions_ + a]; }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  bool same_shape(const Configuration& o) const {
    return individuals_ == o.individuals_ && actions_ == o.actions_;
  }

 private:
  int individuals_ = 0;
  int actions_ = 0;
  std::vector<double> data_;
};

// Nonempty strict subsets of the action set, one per individual. Strictness
// is a construction invariant: an "everything is optimal" set would make the
// performance identically 1 and every statement vacuous.
class OptimalSet {
 public:
  OptimalSet() = default;
  // actions[i] = optimal action indices for individual i (deduplicated, sorted).
  OptimalSet(int num_actions, std::vector<std::vector<int>> actions);
  // Same action set for every individual.
  static OptimalSet broadcast(int num_individuals, int num_actions, std::vector<int> actions);

  int num_individuals() const { return static_cast<int>(actions_.size()); }
  int num_actions() const { return num_actions_; }
  const std::vector<int>& of(int i) const { return actions_[i]; }

 private:
  int num_actions_ = 0;
  std::vector<std::vector<int>> actions_;
};

// Population-mean probability mass on the optimal actions:
//   (1/|W|) * sum_i sum_{a in optimal_i} sigma_i(a)
// Accumulation order is fixed (individuals ascending, actions ascending) so
// the value is reproducible bit for bit.
double aggregate(const Configuration& sigma, const OptimalSet& optimal);

// Interpolated update sigma + theta*(proposed - sigma), applied per
// coordinate, then normalized. theta == 1 copies `proposed` exactly so the
// undamped system is reproduced bit for bit. theta outside (0,1] is a
// parameter error; shape mismatch is a config error.
Configuration slow_step(const Configuration& sigma, const Configuration& proposed, double theta);

// In-place variant used by the engine; returns false on a row invariant
// breach (caller attaches step/seed context).
bool slow_step_into(const Configuration& sigma, const Configuration& proposed, double theta,
                    Configuration& out);

}  // namespace hazard
