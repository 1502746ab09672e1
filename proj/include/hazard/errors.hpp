#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace hazard {

// Bad user-supplied setup: config files, parameter values, dimension
// mismatches. The CLI maps this family to exit code 2.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Parameter outside its documented domain (theta <= 0, probabilities off the
// simplex, ...). Also exit code 2 at the CLI boundary.
struct ParamError : std::invalid_argument {
  explicit ParamError(const std::string& what) : std::invalid_argument(what) {}
};

// A requested exact computation is infeasible for the given sizes
// (enumeration guards) or the operation has no meaning for the model.
struct UnsupportedError : std::runtime_error {
  explicit UnsupportedError(const std::string& what) : std::runtime_error(what) {}
};

// A mid-run breach of a state invariant (row off the simplex beyond the
// 1e-12 normalization tolerance, non-finite value). Carries enough context
// to reproduce: step index and stream seed. CLI exit code 3.
struct InvariantError : std::runtime_error {
  InvariantError(const std::string& what, long long step, std::uint64_t seed)
      : std::runtime_error(what + " (step " + std::to_string(step) + ", seed " +
                           std::to_string(seed) + ")"),
        step(step),
        seed(seed) {}
  long long step;
  std::uint64_t seed;
};

}  // namespace hazard
