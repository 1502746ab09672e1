#pragma once

#include <functional>
#include <vector>

#include "hazard/errors.hpp"

namespace hazard {

// A per-step lower bound delta_t >= 0 on the relative conditional gain of a
// system. is_berhr marks a uniformly positive sequence (with its infimum in
// `floor`); is_square_nonsummable marks sum delta_t^2 = infinity, the extra
// hypothesis the damped-convergence results need.
struct HazardBoundSequence {
  std::function<double(long long)> eval;
  bool is_berhr = false;
  double floor = 0.0;
  bool is_square_nonsummable = false;

  double operator()(long long t) const { return eval(t); }

  static HazardBoundSequence constant(double value) {
    if (!(value >= 0.0)) throw ParamError("hazard bound must be nonnegative");
    HazardBoundSequence h;
    h.eval = [value](long long) { return value; };
    h.is_berhr = value > 0.0;
    h.floor = value;
    h.is_square_nonsummable = value > 0.0;
    return h;
  }

  // Deterministic-in-t bound from an arbitrary formula. Callers set the
  // flags; `floor` must be a true infimum when is_berhr is set.
  static HazardBoundSequence from_function(std::function<double(long long)> f, bool berhr,
                                           double floor, bool square_nonsummable) {
    if (!f) throw ParamError("hazard bound needs an evaluation function");
    if (berhr && !(floor > 0.0))
      throw ParamError("a uniformly positive hazard bound needs a positive floor");
    HazardBoundSequence h;
    h.eval = std::move(f);
    h.is_berhr = berhr;
    h.floor = floor;
    h.is_square_nonsummable = square_nonsummable;
    return h;
  }
};

// Smallest positive integer g with exp(-g * p0) < epsilon. This is the
// damping denominator used by the epsilon-guarantee schedule below.
int slowing_denominator(double p0, double epsilon);

// Step-size sequence theta_t in (0,1] applied as
//   sigma_{t+1} = sigma_t + theta_t * (proposed - sigma_t).
// Value type so configurations can describe and serialize it.
struct SlowingSchedule {
  enum class Kind { kConstant, kHarmonic, kEpsilonGuarantee, kProduct };

  Kind kind = Kind::kConstant;
  double theta = 1.0;               // kConstant
  int denominator = 1;              // kEpsilonGuarantee: theta_t = min(1,delta_t)/denominator
  HazardBoundSequence delta;        // kEpsilonGuarantee
  std::vector<SlowingSchedule> factors;  // kProduct

  double eval(long long t) const;

  bool is_harmonic() const { return kind == Kind::kHarmonic; }

  static SlowingSchedule constant(double theta);
  static SlowingSchedule harmonic();  // theta_t = 1/(t+2)
  // theta_t = (min(1, delta_t)) / g with g = slowing_denominator(p0, epsilon):
  // guarantees terminal-optimality probability above 1 - epsilon for systems
  // whose relative gain is bounded below by delta_t.
  static SlowingSchedule epsilon_guarantee(double p0, double epsilon, HazardBoundSequence delta);
  // Pointwise product of factors (each in (0,1], so the product is too).
  static SlowingSchedule product(std::vector<SlowingSchedule> factors);
};

}  // namespace hazard
