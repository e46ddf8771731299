#pragma once

#include <cstdint>
#include <cstring>
#include <string_view>

namespace curator::util {

// splitmix64 finalizer; also used to derive per-index hash parameter streams.
inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// 64-bit string hash: FNV-1a with a splitmix avalanche on top. Good enough
// dispersion for shingles, feature buckets and LSH band keys.
inline uint64_t hash64(const void* data, size_t len, uint64_t seed = 0) {
  const auto* p = static_cast<const unsigned char*>(data);
  uint64_t h = 0xcbf29ce484222325ULL ^ splitmix64(seed);
  for (size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return splitmix64(h);
}

inline uint64_t hash64(std::string_view s, uint64_t seed = 0) {
  return hash64(s.data(), s.size(), seed);
}

// Deterministic uniform double in [0, 1) from a hash value.
inline double hash_to_unit(uint64_t h) {
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

// Counter-based RNG: stateless, reproducible, fine for sampling decisions.
class SplitMixRng {
 public:
  explicit SplitMixRng(uint64_t seed) : state_(seed) {}

  uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Unbiased-enough bounded draw (Lemire reduction).
  uint64_t next_below(uint64_t bound) {
    return static_cast<uint64_t>(
        (static_cast<unsigned __int128>(next()) * bound) >> 64);
  }

  double next_unit() { return hash_to_unit(next()); }

 private:
  uint64_t state_;
};

}  // namespace curator::util
