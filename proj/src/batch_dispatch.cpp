#include "hazard/batch.hpp"

namespace hazard {
namespace batch {

bool avx2_available() {
#if defined(HAZARD_HAVE_AVX2_TU) && (defined(__x86_64__) || defined(_M_X64))
  return __builtin_cpu_supports("avx2") != 0;
#else
  return false;
#endif
}

Kernel resolve_kernel(Kernel requested) {
  if (requested == Kernel::kAuto) return avx2_available() ? Kernel::kAvx2 : Kernel::kScalar;
  if (requested == Kernel::kAvx2 && !avx2_available())
    throw UnsupportedError("AVX2 kernel requested but not available on this CPU");
  return requested;
}

const char* kernel_name(Kernel resolved) {
  switch (resolved) {
    case Kernel::kAuto: return "auto";
    case Kernel::kScalar: return "scalar";
    case Kernel::kAvx2: return "avx2";
  }
  return "unknown";
}

void run_batch(const BatchSpec& spec, std::span<const std::uint64_t> seeds,
               std::span<double> terminal_p, std::span<std::uint8_t> floor_violated,
               BatchAccum& accum, BatchBreach& breach, Kernel kernel) {
  switch (resolve_kernel(kernel)) {
#if defined(HAZARD_HAVE_AVX2_TU) && (defined(__x86_64__) || defined(_M_X64))
    case Kernel::kAvx2:
      run_batch_avx2(spec, seeds, terminal_p, floor_violated, accum, breach);
      return;
#endif
    default:
      run_batch_scalar(spec, seeds, terminal_p, floor_violated, accum, breach);
      return;
  }
}

}  // namespace batch
}  // namespace hazard
