#include "curator/kernels.h"

#include "kernels_internal.h"

namespace curator::kernels {

namespace {

bool cpu_has(Backend b) {
  switch (b) {
    case Backend::kScalar:
      return true;
    case Backend::kAvx2:
#if defined(CURATOR_HAVE_AVX2)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Backend::kAvx512:
#if defined(CURATOR_HAVE_AVX512)
      return __builtin_cpu_supports("avx512f") &&
             __builtin_cpu_supports("avx512dq");
#else
      return false;
#endif
  }
  return false;
}

Backend best_backend() {
  if (cpu_has(Backend::kAvx512)) return Backend::kAvx512;
  if (cpu_has(Backend::kAvx2)) return Backend::kAvx2;
  return Backend::kScalar;
}

Backend g_backend = best_backend();

}  // namespace

void minhash_fold(uint64_t value, std::span<const uint64_t> mul,
                  std::span<const uint64_t> add, std::span<uint64_t> sig) {
  const size_t n = sig.size();
#if defined(CURATOR_HAVE_AVX512)
  if (g_backend == Backend::kAvx512) {
    detail::minhash_fold_avx512(value, mul.data(), add.data(), sig.data(), n);
    return;
  }
#endif
#if defined(CURATOR_HAVE_AVX2)
  if (g_backend == Backend::kAvx2) {
    detail::minhash_fold_avx2(value, mul.data(), add.data(), sig.data(), n);
    return;
  }
#endif
  detail::minhash_fold_scalar(value, mul.data(), add.data(), sig.data(), n);
}

size_t count_equal(std::span<const uint64_t> a, std::span<const uint64_t> b) {
  const size_t n = a.size();
#if defined(CURATOR_HAVE_AVX512)
  if (g_backend == Backend::kAvx512)
    return detail::count_equal_avx512(a.data(), b.data(), n);
#endif
#if defined(CURATOR_HAVE_AVX2)
  if (g_backend == Backend::kAvx2)
    return detail::count_equal_avx2(a.data(), b.data(), n);
#endif
  return detail::count_equal_scalar(a.data(), b.data(), n);
}

Backend active_backend() { return g_backend; }

bool backend_available(Backend b) { return cpu_has(b); }

bool set_backend(Backend b) {
  if (!cpu_has(b)) return false;
  g_backend = b;
  return true;
}

void reset_backend() { g_backend = best_backend(); }

const char* backend_name(Backend b) {
  switch (b) {
    case Backend::kScalar:
      return "scalar";
    case Backend::kAvx2:
      return "avx2";
    case Backend::kAvx512:
      return "avx512";
  }
  return "?";
}

std::vector<Backend> available_backends() {
  std::vector<Backend> out;
  for (Backend b : {Backend::kScalar, Backend::kAvx2, Backend::kAvx512})
    if (cpu_has(b)) out.push_back(b);
  return out;
}

}  // namespace curator::kernels
