#pragma once

#include <cstddef>
#include <cstdint>

namespace curator::kernels::detail {

void minhash_fold_scalar(uint64_t value, const uint64_t* mul,
                         const uint64_t* add, uint64_t* sig, size_t n);
size_t count_equal_scalar(const uint64_t* a, const uint64_t* b, size_t n);

#if defined(CURATOR_HAVE_AVX2)
void minhash_fold_avx2(uint64_t value, const uint64_t* mul,
                       const uint64_t* add, uint64_t* sig, size_t n);
size_t count_equal_avx2(const uint64_t* a, const uint64_t* b, size_t n);
#endif

#if defined(CURATOR_HAVE_AVX512)
void minhash_fold_avx512(uint64_t value, const uint64_t* mul,
                         const uint64_t* add, uint64_t* sig, size_t n);
size_t count_equal_avx512(const uint64_t* a, const uint64_t* b, size_t n);
#endif

}  // namespace curator::kernels::detail
