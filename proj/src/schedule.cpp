#include "hazard/schedule.hpp"

#include <cmath>
#include <string>

namespace hazard {

int slowing_denominator(double p0, double epsilon) {
  if (!(p0 > 0.0 && p0 <= 1.0))
    throw ParamError("slowing_denominator: initial performance must be in (0,1], got " +
                     std::to_string(p0));
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw ParamError("slowing_denominator: epsilon must be in (0,1), got " +
                     std::to_string(epsilon));
  // Closed-form estimate, then nudge across the strict inequality to be
  // immune to rounding in log/exp.
  int g = static_cast<int>(std::ceil(-std::log(epsilon) / p0));
  if (g < 1) g = 1;
  while (!(std::exp(-static_cast<double>(g) * p0) < epsilon)) ++g;
  while (g > 1 && std::exp(-static_cast<double>(g - 1) * p0) < epsilon) --g;
  return g;
}

double SlowingSchedule::eval(long long t) const {
  switch (kind) {
    case Kind::kConstant:
      return theta;
    case Kind::kHarmonic:
      return 1.0 / static_cast<double>(t + 2);
    case Kind::kEpsilonGuarantee: {
      double d = delta(t);
      if (d > 1.0) d = 1.0;
      return d / static_cast<double>(denominator);
    }
    case Kind::kProduct: {
      double p = 1.0;
      for (const auto& f : factors) p *= f.eval(t);
      return p;
    }
  }
  return theta;
}

SlowingSchedule SlowingSchedule::constant(double theta) {
  if (!(theta > 0.0 && theta <= 1.0))
    throw ParamError("slowing schedule: theta must lie in (0,1], got " + std::to_string(theta));
  SlowingSchedule s;
  s.kind = Kind::kConstant;
  s.theta = theta;
  return s;
}

SlowingSchedule SlowingSchedule::harmonic() {
  SlowingSchedule s;
  s.kind = Kind::kHarmonic;
  return s;
}

SlowingSchedule SlowingSchedule::epsilon_guarantee(double p0, double epsilon,
                                                   HazardBoundSequence delta) {
  if (!delta.eval) throw ParamError("slowing schedule: missing hazard bound");
  if (!delta.is_berhr)
    throw ParamError(
        "slowing schedule: the epsilon guarantee needs a uniformly positive hazard bound");
  SlowingSchedule s;
  s.kind = Kind::kEpsilonGuarantee;
  s.denominator = slowing_denominator(p0, epsilon);
  s.delta = std::move(delta);
  return s;
}

SlowingSchedule SlowingSchedule::product(std::vector<SlowingSchedule> factors) {
  if (factors.empty()) throw ParamError("slowing schedule: product needs at least one factor");
  SlowingSchedule s;
  s.kind = Kind::kProduct;
  s.factors = std::move(factors);
  return s;
}

}  // namespace hazard
