#include "kernels_internal.h"

namespace curator::kernels::detail {

// Reference semantics for both kernels; the SIMD variants must match this
// bit for bit on every input.

void minhash_fold_scalar(uint64_t value, const uint64_t* mul,
                         const uint64_t* add, uint64_t* sig, size_t n) {
  for (size_t i = 0; i < n; ++i) {
    const uint64_t h = mul[i] * value + add[i];
    if (h < sig[i]) sig[i] = h;
  }
}

size_t count_equal_scalar(const uint64_t* a, const uint64_t* b, size_t n) {
  size_t matches = 0;
  for (size_t i = 0; i < n; ++i) matches += a[i] == b[i] ? 1 : 0;
  return matches;
}

}  // namespace curator::kernels::detail
