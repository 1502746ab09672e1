// AVX2 variants of the batch trajectory kernels. Transliterated from
// batch_ref.cpp operation for operation: same draw order, same arithmetic,
// same (l0+l2)+(l1+l3) reduction tree, so results are bit-identical to the
// scalar reference (enforced by the equivalence suite). Compiled with -mavx2
// only; callers reach it through run_batch after a cpuid probe.

#include <immintrin.h>

#include <algorithm>
#include <cstring>

#include "hazard/batch.hpp"

namespace hazard {
namespace batch {

namespace {

constexpr int kLanes = 4;

// 64x64 -> low 64 multiply from 32-bit pieces (AVX2 has no vpmullq):
// lo(a*b) = lo(a_lo*b_lo) + ((a_lo*b_hi + a_hi*b_lo) << 32).
inline __m256i mul64_lo(__m256i a, __m256i b) {
  const __m256i a_hi = _mm256_srli_epi64(a, 32);
  const __m256i b_hi = _mm256_srli_epi64(b, 32);
  const __m256i cross = _mm256_add_epi64(_mm256_mul_epu32(a, b_hi), _mm256_mul_epu32(a_hi, b));
  return _mm256_add_epi64(_mm256_mul_epu32(a, b), _mm256_slli_epi64(cross, 32));
}

inline __m256i splitmix_next(__m256i& state) {
  const __m256i gamma = _mm256_set1_epi64x(static_cast<long long>(SplitMix64::kGamma));
  state = _mm256_add_epi64(state, gamma);
  __m256i z = state;
  z = _mm256_xor_si256(z, _mm256_srli_epi64(z, 30));
  z = mul64_lo(z, _mm256_set1_epi64x(static_cast<long long>(0xBF58476D1CE4E5B9ull)));
  z = _mm256_xor_si256(z, _mm256_srli_epi64(z, 27));
  z = mul64_lo(z, _mm256_set1_epi64x(static_cast<long long>(0x94D049BB133111EBull)));
  return _mm256_xor_si256(z, _mm256_srli_epi64(z, 31));
}

// (x >> 12) * 2^-52, exactly as the scalar stream: the 52-bit value is
// converted through the 2^52 magic-number bit pattern (exact for v < 2^52).
inline __m256d uniform_from_bits(__m256i x) {
  const __m256i mantissa = _mm256_or_si256(_mm256_srli_epi64(x, 12),
                                           _mm256_set1_epi64x(0x4330000000000000LL));
  const __m256d shifted =
      _mm256_sub_pd(_mm256_castsi256_pd(mantissa), _mm256_set1_pd(0x1.0p52));
  return _mm256_mul_pd(shifted, _mm256_set1_pd(0x1.0p-52));
}

// (l0+l2) + (l1+l3); batch_ref.cpp's hsum4 spells out the same tree.
inline double hsum4(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d pair = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
}

}  // namespace

void run_batch_avx2(const BatchSpec& spec, std::span<const std::uint64_t> seeds,
                    std::span<double> terminal_p, std::span<std::uint8_t> floor_violated,
                    BatchAccum& accum, BatchBreach& breach) {
  const bool is_automaton = spec.model == BatchSpec::Model::kAutomaton;
  if (is_automaton) spec.automaton.validate();
  const bool check_floor = spec.floor_p0 >= 0.0;
  if (terminal_p.size() != seeds.size())
    throw ConfigError("batch: terminal_p size must match seeds");
  if (check_floor && floor_violated.size() != seeds.size())
    throw ConfigError("batch: floor_violated size must match seeds");

  double init0, init1;
  if (is_automaton) {
    init0 = 1.0 - spec.automaton.sigma0;
    init1 = spec.automaton.sigma0;
  } else {
    init0 = spec.sigma0;
    init1 = 1.0 - spec.sigma0;
  }
  {  // same initial normalization as the engine / scalar kernel
    double a = init0, b = init1;
    a = (a <= 0.0) ? 0.0 : a;
    b = (b <= 0.0) ? 0.0 : b;
    const double s = a + b;
    double off = s - 1.0;
    if (off < 0.0) off = -off;
    if (!(a >= 0.0 && b >= 0.0 && off <= kSimplexTol))
      throw ParamError("batch: initial state is not a distribution");
    init0 = a / s;
    init1 = b / s;
  }
  const double init_p = is_automaton ? init1 : init0;

  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d zero = _mm256_setzero_pd();
  const __m256d half = _mm256_set1_pd(0.5);
  const __m256d neg_tol = _mm256_set1_pd(-kSimplexTol);
  const __m256d tol = _mm256_set1_pd(kSimplexTol);
  const __m256d abs_mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7FFFFFFFFFFFFFFFLL));
  const __m256d hazard_floor = _mm256_set1_pd(1e-15);
  const __m256d mu1v = _mm256_set1_pd(spec.automaton.mu1);
  const __m256d mu2v = _mm256_set1_pd(spec.automaton.mu2);
  const __m256d retain = _mm256_set1_pd(1.0 - spec.automaton.beta);

  const std::size_t n_reps = seeds.size();
  for (std::size_t base = 0; base < n_reps; base += kLanes) {
    const int active = static_cast<int>(std::min<std::size_t>(kLanes, n_reps - base));

    alignas(32) std::uint64_t rs[kLanes];
    alignas(32) double active_arr[kLanes];
    for (int l = 0; l < kLanes; ++l) {
      rs[l] = l < active ? seeds[base + l] : 0;
      std::uint64_t bits = l < active ? ~0ull : 0ull;
      std::memcpy(&active_arr[l], &bits, sizeof(double));
    }
    __m256i state = _mm256_load_si256(reinterpret_cast<const __m256i*>(rs));
    const __m256d active_mask = _mm256_load_pd(active_arr);

    __m256d c0 = _mm256_set1_pd(init0);
    __m256d c1 = _mm256_set1_pd(init1);
    __m256d last_p = _mm256_set1_pd(init_p);
    __m256d stride_p = last_p;
    __m256d violated = zero;  // all-bits mask per lane once the floor breaks

    std::size_t k = 0;
    std::size_t pending_hazard = accum.ts.size();

    if (!accum.ts.empty() && accum.ts[0] == 0) {
      const __m256d v = _mm256_and_pd(active_mask, last_p);
      accum.sum_p[0] += hsum4(v);
      accum.sum_p2[0] += hsum4(_mm256_mul_pd(v, v));
      if (spec.horizon > 0) pending_hazard = 0;
      k = 1;
    }

    for (long long t = 0; t < spec.horizon; ++t) {
      __m256d p0, p1;
      if (is_automaton) {
        const __m256d u1 = uniform_from_bits(splitmix_next(state));
        const __m256d u2 = uniform_from_bits(splitmix_next(state));
        const __m256d u3 = uniform_from_bits(splitmix_next(state));
        const __m256d sig = c1;
        const __m256d up_mask = _mm256_and_pd(_mm256_cmp_pd(u3, sig, _CMP_LE_OQ),
                                              _mm256_cmp_pd(u2, mu2v, _CMP_LT_OQ));
        const __m256d dn_mask = _mm256_and_pd(_mm256_cmp_pd(u3, sig, _CMP_GT_OQ),
                                              _mm256_cmp_pd(u1, mu1v, _CMP_LT_OQ));
        const __m256d up = _mm256_and_pd(up_mask, _mm256_sub_pd(one, sig));
        const __m256d dn = _mm256_and_pd(dn_mask, sig);
        const __m256d next = _mm256_add_pd(sig, _mm256_mul_pd(retain, _mm256_sub_pd(up, dn)));
        p1 = next;
        p0 = _mm256_sub_pd(one, next);
      } else {
        const __m256d u = uniform_from_bits(splitmix_next(state));
        const __m256d sig = c0;
        const __m256d thr = _mm256_mul_pd(_mm256_add_pd(one, sig), half);
        const __m256d jump = _mm256_and_pd(_mm256_cmp_pd(sig, zero, _CMP_GT_OQ),
                                           _mm256_cmp_pd(u, thr, _CMP_LE_OQ));
        p0 = _mm256_and_pd(jump, one);
        p1 = _mm256_sub_pd(one, p0);
      }

      const double theta = spec.theta ? spec.theta[t] : 1.0;
      if (theta == 1.0) {
        c0 = p0;
        c1 = p1;
      } else {
        const __m256d th = _mm256_set1_pd(theta);
        c0 = _mm256_add_pd(c0, _mm256_mul_pd(th, _mm256_sub_pd(p0, c0)));
        c1 = _mm256_add_pd(c1, _mm256_mul_pd(th, _mm256_sub_pd(p1, c1)));
      }

      // normalize2: breach below -tol, clamp [-tol,0) to zero, divide by sum.
      __m256d bad = _mm256_or_pd(_mm256_cmp_pd(c0, neg_tol, _CMP_LT_OQ),
                                 _mm256_cmp_pd(c1, neg_tol, _CMP_LT_OQ));
      c0 = _mm256_max_pd(c0, zero);
      c1 = _mm256_max_pd(c1, zero);
      const __m256d sum = _mm256_add_pd(c0, c1);
      const __m256d off = _mm256_and_pd(abs_mask, _mm256_sub_pd(sum, one));
      bad = _mm256_or_pd(bad, _mm256_cmp_pd(off, tol, _CMP_GT_OQ));
      bad = _mm256_and_pd(bad, active_mask);
      const int bad_bits = _mm256_movemask_pd(bad);
      if (bad_bits != 0) {
        breach.hit = true;
        breach.step = t + 1;
        breach.lane = static_cast<std::int64_t>(base) + __builtin_ctz(bad_bits);
        return;
      }
      c0 = _mm256_div_pd(c0, sum);
      c1 = _mm256_div_pd(c1, sum);

      const __m256d now_p = is_automaton ? c1 : c0;

      if (pending_hazard < accum.ts.size()) {
        const __m256d denom = _mm256_mul_pd(last_p, _mm256_sub_pd(one, last_p));
        const __m256d ok =
            _mm256_and_pd(active_mask, _mm256_cmp_pd(denom, hazard_floor, _CMP_GE_OQ));
        const __m256d h =
            _mm256_and_pd(ok, _mm256_div_pd(_mm256_sub_pd(now_p, last_p), denom));
        accum.sum_hazard[pending_hazard] += hsum4(h);
        accum.n_hazard[pending_hazard] += __builtin_popcount(_mm256_movemask_pd(ok));
        pending_hazard = accum.ts.size();
      }

      last_p = now_p;

      if (check_floor) {
        const __m256d fl = _mm256_set1_pd(spec.floor_p0 / static_cast<double>(t + 2));
        violated = _mm256_or_pd(violated, _mm256_cmp_pd(last_p, fl, _CMP_LT_OQ));
      }

      if (k < accum.ts.size() && accum.ts[k] == t + 1) {
        const __m256d v = _mm256_and_pd(active_mask, last_p);
        const __m256d d = _mm256_and_pd(active_mask, _mm256_sub_pd(last_p, stride_p));
        accum.sum_p[k] += hsum4(v);
        accum.sum_p2[k] += hsum4(_mm256_mul_pd(v, v));
        accum.sum_dp[k - 1] += hsum4(d);
        accum.sum_dp2[k - 1] += hsum4(_mm256_mul_pd(d, d));
        stride_p = last_p;
        if (t + 1 < spec.horizon) pending_hazard = k;
        ++k;
      }
    }

    alignas(32) double lp[kLanes];
    _mm256_store_pd(lp, last_p);
    const int viol_bits = _mm256_movemask_pd(violated);
    for (int l = 0; l < active; ++l) {
      terminal_p[base + l] = lp[l];
      if (check_floor) floor_violated[base + l] = (viol_bits >> l) & 1;
    }
  }
}

}  // namespace batch
}  // namespace hazard
