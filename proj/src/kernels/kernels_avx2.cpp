#if defined(CURATOR_HAVE_AVX2)

#include <immintrin.h>

#include "kernels_internal.h"

namespace curator::kernels::detail {

namespace {

// 64x64 -> low 64 multiply from 32-bit pieces (AVX2 has no mullo_epi64):
// lo(a)*lo(b) + ((lo(a)*hi(b) + hi(a)*lo(b)) << 32).
inline __m256i mullo64(__m256i a, __m256i b) {
  const __m256i bswap = _mm256_shuffle_epi32(b, 0xB1);
  const __m256i prodlh = _mm256_mullo_epi32(a, bswap);
  const __m256i zero = _mm256_setzero_si256();
  const __m256i prodlh2 = _mm256_hadd_epi32(prodlh, zero);
  const __m256i prodlh3 = _mm256_shuffle_epi32(prodlh2, 0x73);
  const __m256i prodll = _mm256_mul_epu32(a, b);
  return _mm256_add_epi64(prodll, prodlh3);
}

// Unsigned 64-bit min via sign-flipped signed compare.
inline __m256i min_epu64(__m256i a, __m256i b) {
  const __m256i sign = _mm256_set1_epi64x(
      static_cast<long long>(0x8000000000000000ULL));
  const __m256i gt = _mm256_cmpgt_epi64(_mm256_xor_si256(a, sign),
                                        _mm256_xor_si256(b, sign));
  return _mm256_blendv_epi8(a, b, gt);
}

}  // namespace

void minhash_fold_avx2(uint64_t value, const uint64_t* mul,
                       const uint64_t* add, uint64_t* sig, size_t n) {
  const __m256i v = _mm256_set1_epi64x(static_cast<long long>(value));
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256i m = _mm256_loadu_si256(
        reinterpret_cast<const __m256i*>(mul + i));
    const __m256i a = _mm256_loadu_si256(
        reinterpret_cast<const __m256i*>(add + i));
    const __m256i s = _mm256_loadu_si256(
        reinterpret_cast<const __m256i*>(sig + i));
    const __m256i h = _mm256_add_epi64(mullo64(m, v), a);
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(sig + i),
                        min_epu64(h, s));
  }
  for (; i < n; ++i) {
    const uint64_t h = mul[i] * value + add[i];
    if (h < sig[i]) sig[i] = h;
  }
}

size_t count_equal_avx2(const uint64_t* a, const uint64_t* b, size_t n) {
  size_t matches = 0;
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256i va = _mm256_loadu_si256(
        reinterpret_cast<const __m256i*>(a + i));
    const __m256i vb = _mm256_loadu_si256(
        reinterpret_cast<const __m256i*>(b + i));
    const __m256i eq = _mm256_cmpeq_epi64(va, vb);
    const int mask = _mm256_movemask_pd(_mm256_castsi256_pd(eq));
    matches += static_cast<size_t>(__builtin_popcount(
        static_cast<unsigned>(mask)));
  }
  for (; i < n; ++i) matches += a[i] == b[i] ? 1 : 0;
  return matches;
}

}  // namespace curator::kernels::detail

#endif
