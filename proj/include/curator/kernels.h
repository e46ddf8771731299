#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace curator::kernels {

// Data-parallel inner loops behind the dedup pipeline. Each kernel has a
// scalar reference implementation plus AVX2/AVX-512 variants; the variants
// are bit-identical to the reference and selected once at startup from CPU
// capabilities. `set_backend` narrows the choice (tests run every variant).

enum class Backend { kScalar, kAvx2, kAvx512 };

// Fold one element through every affine permutation and keep the minima:
//   sig[i] = min(sig[i], mul[i] * value + add[i])   (mod 2^64, mul[i] odd)
// mul/add/sig share length; called once per shingle hash.
void minhash_fold(uint64_t value, std::span<const uint64_t> mul,
                  std::span<const uint64_t> add, std::span<uint64_t> sig);

// Number of positions where a[i] == b[i]; spans share length.
size_t count_equal(std::span<const uint64_t> a, std::span<const uint64_t> b);

Backend active_backend();
bool backend_available(Backend b);
// False if the requested backend is not supported on this CPU.
bool set_backend(Backend b);
void reset_backend();  // back to best available

const char* backend_name(Backend b);
std::vector<Backend> available_backends();

}  // namespace curator::kernels
