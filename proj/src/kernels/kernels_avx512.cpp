#if defined(CURATOR_HAVE_AVX512)

#include <immintrin.h>

#include "kernels_internal.h"

namespace curator::kernels::detail {

// AVX-512F/DQ gives native 64-bit mullo and unsigned min; the loop body is
// exactly the scalar recurrence, eight lanes at a time.

void minhash_fold_avx512(uint64_t value, const uint64_t* mul,
                         const uint64_t* add, uint64_t* sig, size_t n) {
  const __m512i v = _mm512_set1_epi64(static_cast<long long>(value));
  size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m512i m = _mm512_loadu_si512(mul + i);
    const __m512i a = _mm512_loadu_si512(add + i);
    const __m512i s = _mm512_loadu_si512(sig + i);
    const __m512i h = _mm512_add_epi64(_mm512_mullo_epi64(m, v), a);
    _mm512_storeu_si512(sig + i, _mm512_min_epu64(h, s));
  }
  for (; i < n; ++i) {
    const uint64_t h = mul[i] * value + add[i];
    if (h < sig[i]) sig[i] = h;
  }
}

size_t count_equal_avx512(const uint64_t* a, const uint64_t* b, size_t n) {
  size_t matches = 0;
  size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m512i va = _mm512_loadu_si512(a + i);
    const __m512i vb = _mm512_loadu_si512(b + i);
    const __mmask8 eq = _mm512_cmpeq_epi64_mask(va, vb);
    matches += static_cast<size_t>(__builtin_popcount(eq));
  }
  for (; i < n; ++i) matches += a[i] == b[i] ? 1 : 0;
  return matches;
}

}  // namespace curator::kernels::detail

#endif
