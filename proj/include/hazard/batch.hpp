#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hazard/automata.hpp"

namespace hazard {
namespace batch {

// Batch trajectory kernels for the two scalar-state systems. They run many
// replications of the same system in lockstep, four lanes per block, and are
// the compute path for the heavy Monte Carlo work. Two implementations:
// a scalar reference and an AVX2 variant (x86-64, picked at runtime after a
// cpuid probe). Both perform the identical floating-point operations in the
// identical order as the generic engine, so all three agree bit for bit;
// the equivalence suite enforces this.

enum class Kernel { kAuto, kScalar, kAvx2 };

bool avx2_available();
// The kernel kAuto resolves to on this machine.
Kernel resolve_kernel(Kernel requested);
const char* kernel_name(Kernel resolved);

struct BatchSpec {
  enum class Model { kAbsorbing, kAutomaton };
  Model model = Model::kAutomaton;
  double sigma0 = 0.5;          // kAbsorbing
  TwoArmedParams automaton;     // kAutomaton

  long long horizon = 0;
  // Per-step damping factors, length >= horizon; nullptr = undamped.
  const double* theta = nullptr;
  // Curve sampling stride (> 0). Curve points: multiples of stride plus the
  // final step.
  long long stride = 1;
  // Performance floor check P_t >= floor_p0/(t+1), exact comparison per
  // step; negative disables (used with the harmonic schedule).
  double floor_p0 = -1.0;
};

// Times at which curve statistics are accumulated.
std::vector<long long> curve_points(long long horizon, long long stride);

// Curve accumulators over a replication range. Within a block of four lanes
// values reduce as (l0+l2)+(l1+l3) - the AVX2 horizontal-add tree - and
// blocks accumulate in index order, so sums do not depend on the kernel or
// on how ranges are split across workers (ranges must start at multiples
// of 4).
struct BatchAccum {
  std::vector<long long> ts;
  std::vector<double> sum_p;    // per curve point
  std::vector<double> sum_p2;
  std::vector<double> sum_hazard;
  std::vector<long long> n_hazard;  // lanes with P(1-P) >= 1e-15 at the point
  std::vector<double> sum_dp;   // per interval between curve points
  std::vector<double> sum_dp2;

  void init(const std::vector<long long>& points);
  void merge(const BatchAccum& other);  // element-wise add (task-order merge)
};

// First simplex breach, if any (mirrors the engine's InvariantError data).
struct BatchBreach {
  bool hit = false;
  long long step = 0;
  std::int64_t lane = 0;  // replication offset within the range
};

// Run |seeds| replications. terminal_p must have seeds.size() slots;
// floor_violated may be empty when the floor check is disabled. Offsets of
// `seeds` within the experiment must be multiples of 4 for cross-worker
// reproducibility.
void run_batch(const BatchSpec& spec, std::span<const std::uint64_t> seeds,
               std::span<double> terminal_p, std::span<std::uint8_t> floor_violated,
               BatchAccum& accum, BatchBreach& breach, Kernel kernel = Kernel::kAuto);

// Implementation entry points (exposed for the equivalence tests).
void run_batch_scalar(const BatchSpec& spec, std::span<const std::uint64_t> seeds,
                      std::span<double> terminal_p, std::span<std::uint8_t> floor_violated,
                      BatchAccum& accum, BatchBreach& breach);
#if defined(__x86_64__) || defined(_M_X64)
void run_batch_avx2(const BatchSpec& spec, std::span<const std::uint64_t> seeds,
                    std::span<double> terminal_p, std::span<std::uint8_t> floor_violated,
                    BatchAccum& accum, BatchBreach& breach);
#endif

}  // namespace batch
}  // namespace hazard
