#include <immintrin.h>

#include "oligo/detail/mfa_map.hpp"
#include "oligo/simd/kernels.hpp"

namespace oligo::simd {

namespace {

inline __m256d abs_pd(__m256d v) { return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v); }

inline __m256d cube(__m256d v) { return _mm256_mul_pd(_mm256_mul_pd(v, v), v); }

// c_a (q_s - q_a) + c_b (q_s - q_b)
inline __m256d bracket(__m256d qs, __m256d ca, __m256d qa, __m256d cb, __m256d qb) {
  return _mm256_add_pd(_mm256_mul_pd(ca, _mm256_sub_pd(qs, qa)),
                       _mm256_mul_pd(cb, _mm256_sub_pd(qs, qb)));
}

}  // namespace

void mfa_fixed_point_avx2(bool cf, const MfaBatch& in, double tol, std::int64_t max_iter,
                          MfaBatchResult& out) {
  const std::size_t n = in.size();
  out.resize(n);
  const std::size_t full = n - n % 4;
  const __m256d zero = _mm256_setzero_pd();
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d vtol = _mm256_set1_pd(tol);

  for (std::size_t i = 0; i < full; i += 4) {
    __m256d c1 = _mm256_loadu_pd(&in.c1[i]);
    __m256d c2 = _mm256_loadu_pd(&in.c2[i]);
    __m256d c3 = _mm256_loadu_pd(&in.c3[i]);
    const __m256d h1 = _mm256_loadu_pd(&in.h1[i]);
    const __m256d h2 = _mm256_loadu_pd(&in.h2[i]);
    const __m256d h3 = _mm256_loadu_pd(&in.h3[i]);
    const __m256d p = _mm256_loadu_pd(&in.p[i]);
    const __m256d adv = _mm256_sub_pd(one, p);
    const __m256d k = cf ? one : p;

    __m256d active = _mm256_castsi256_pd(_mm256_set1_epi64x(-1));
    __m256d residual = zero;
    __m256d clamped = zero;
    alignas(32) std::int64_t iters[4] = {0, 0, 0, 0};

    for (std::int64_t it = 0; it < max_iter && _mm256_movemask_pd(active) != 0; ++it) {
      const __m256d q1 = cube(c1);
      const __m256d q2 = cube(c2);
      const __m256d q3 = cube(c3);
      const __m256d b1 = bracket(q1, c2, q2, c3, q3);
      const __m256d b2 = bracket(q2, c1, q1, c3, q3);
      const __m256d b3 = bracket(q3, c1, q1, c2, q2);
      const __m256d d1 = _mm256_add_pd(_mm256_mul_pd(adv, _mm256_sub_pd(h1, c1)),
                                       _mm256_mul_pd(_mm256_mul_pd(k, c1), b1));
      const __m256d d2 = _mm256_add_pd(_mm256_mul_pd(adv, _mm256_sub_pd(h2, c2)),
                                       _mm256_mul_pd(_mm256_mul_pd(k, c2), b2));
      const __m256d d3 = _mm256_add_pd(_mm256_mul_pd(adv, _mm256_sub_pd(h3, c3)),
                                       _mm256_mul_pd(_mm256_mul_pd(k, c3), b3));
      __m256d n1 = _mm256_add_pd(c1, d1);
      __m256d n2 = _mm256_add_pd(c2, d2);
      __m256d n3 = _mm256_add_pd(c3, d3);

      const __m256d neg1 = _mm256_cmp_pd(n1, zero, _CMP_LT_OQ);
      const __m256d neg2 = _mm256_cmp_pd(n2, zero, _CMP_LT_OQ);
      const __m256d neg3 = _mm256_cmp_pd(n3, zero, _CMP_LT_OQ);
      const __m256d any_neg = _mm256_or_pd(_mm256_or_pd(neg1, neg2), neg3);
      if (_mm256_movemask_pd(any_neg) != 0) {
        const __m256d z1 = _mm256_blendv_pd(n1, zero, neg1);
        const __m256d z2 = _mm256_blendv_pd(n2, zero, neg2);
        const __m256d z3 = _mm256_blendv_pd(n3, zero, neg3);
        const __m256d sum = _mm256_add_pd(_mm256_add_pd(z1, z2), z3);
        n1 = _mm256_blendv_pd(n1, _mm256_div_pd(z1, sum), any_neg);
        n2 = _mm256_blendv_pd(n2, _mm256_div_pd(z2, sum), any_neg);
        n3 = _mm256_blendv_pd(n3, _mm256_div_pd(z3, sum), any_neg);
      }

      const __m256d r = _mm256_max_pd(
          _mm256_max_pd(abs_pd(_mm256_sub_pd(n1, c1)), abs_pd(_mm256_sub_pd(n2, c2))),
          abs_pd(_mm256_sub_pd(n3, c3)));

      c1 = _mm256_blendv_pd(c1, n1, active);
      c2 = _mm256_blendv_pd(c2, n2, active);
      c3 = _mm256_blendv_pd(c3, n3, active);
      residual = _mm256_blendv_pd(residual, r, active);
      clamped = _mm256_or_pd(clamped, _mm256_and_pd(any_neg, active));

      const int live = _mm256_movemask_pd(active);
      for (int lane = 0; lane < 4; ++lane) iters[lane] += (live >> lane) & 1;
      active = _mm256_andnot_pd(_mm256_cmp_pd(r, vtol, _CMP_LT_OQ), active);
    }

    _mm256_storeu_pd(&out.c1[i], c1);
    _mm256_storeu_pd(&out.c2[i], c2);
    _mm256_storeu_pd(&out.c3[i], c3);
    _mm256_storeu_pd(&out.residual[i], residual);
    const int clamp_bits = _mm256_movemask_pd(clamped);
    for (int lane = 0; lane < 4; ++lane) {
      out.iterations[i + lane] = iters[lane];
      out.clamped[i + lane] = static_cast<std::uint8_t>((clamp_bits >> lane) & 1);
    }
  }

  for (std::size_t i = full; i < n; ++i) {
    const auto r = detail::mfa_iterate(cf, in.p[i], in.h1[i], in.h2[i], in.h3[i],
                                       {in.c1[i], in.c2[i], in.c3[i]}, tol, max_iter);
    out.c1[i] = r.c.c1;
    out.c2[i] = r.c.c2;
    out.c3[i] = r.c.c3;
    out.iterations[i] = r.iterations;
    out.residual[i] = r.residual;
    out.clamped[i] = r.clamped ? 1 : 0;
  }
}

std::array<std::int64_t, 3> tally_avx2(std::span<const std::uint8_t> labels) {
  const std::size_t n = labels.size();
  const std::uint8_t* data = labels.data();
  const __m256i one = _mm256_set1_epi8(1);
  const __m256i two = _mm256_set1_epi8(2);
  const __m256i zero = _mm256_setzero_si256();

  std::int64_t ones = 0;
  std::int64_t twos = 0;
  std::size_t i = 0;
  while (i + 32 <= n) {
    // Byte accumulators saturate after 255 blocks; flush via SAD before then.
    __m256i acc1 = zero;
    __m256i acc2 = zero;
    for (int block = 0; block < 255 && i + 32 <= n; ++block, i += 32) {
      const __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(data + i));
      acc1 = _mm256_sub_epi8(acc1, _mm256_cmpeq_epi8(v, one));
      acc2 = _mm256_sub_epi8(acc2, _mm256_cmpeq_epi8(v, two));
    }
    const __m256i s1 = _mm256_sad_epu8(acc1, zero);
    const __m256i s2 = _mm256_sad_epu8(acc2, zero);
    ones += _mm256_extract_epi64(s1, 0) + _mm256_extract_epi64(s1, 1) +
            _mm256_extract_epi64(s1, 2) + _mm256_extract_epi64(s1, 3);
    twos += _mm256_extract_epi64(s2, 0) + _mm256_extract_epi64(s2, 1) +
            _mm256_extract_epi64(s2, 2) + _mm256_extract_epi64(s2, 3);
  }
  std::array<std::int64_t, 3> counts{ones, twos, static_cast<std::int64_t>(i) - ones - twos};
  for (; i < n; ++i) ++counts[data[i] - 1];
  return counts;
}

}  // namespace oligo::simd
