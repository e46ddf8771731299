#pragma once

#include <cstdint>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "curator/corpus.h"

namespace curator::dedup {

// Hashes of the k-character windows of a whitespace-collapsed text.
struct ShingleSet {
  uint32_t k = 0;
  std::unordered_set<uint64_t> hashes;
};

ShingleSet shingle(std::string_view text, uint32_t k);

// Per-position minima under seeded affine permutations of the shingle
// hashes. An empty shingle set leaves every position at the sentinel.
struct MinHashSignature {
  static constexpr uint64_t kSentinel = ~0ULL;
  uint32_t num_hashes = 0;
  uint64_t seed = 0;
  std::vector<uint64_t> values;
};

MinHashSignature minhash(const ShingleSet& shingles, uint32_t num_hashes,
                         uint64_t seed);

// Fraction of matching signature positions; estimates Jaccard similarity.
double jaccard_estimate(const MinHashSignature& a, const MinHashSignature& b);

struct LshParams {
  uint32_t bands = 16;
  uint32_t rows = 8;       // bands * rows must equal num_hashes
  double threshold = 0.8;  // candidate pairs must estimate at least this
};

// Groups of near-duplicate document indices (size >= 2, each sorted, groups
// ordered by first member). Documents with empty signatures never group.
std::vector<std::vector<size_t>> lsh_group(
    const std::vector<MinHashSignature>& signatures, const LshParams& params);

struct DedupParams {
  uint32_t shingle_k = 5;
  uint32_t num_hashes = 128;
  LshParams lsh;
  uint64_t seed = 0;
};

struct FilterOutcome {
  corpus::CorpusManifest kept;
  std::vector<corpus::Document> dropped;  // drop_reasons annotated
};

// Near-duplicate removal over a manifest: keep the earliest document of
// every group, drop the rest with reason NEAR_DUP.
FilterOutcome drop_near_duplicates(const corpus::CorpusManifest& manifest,
                                   const DedupParams& params);

// Cap corpus-wide recurrence of exact (normalized) paragraphs: occurrences
// beyond max_occurrences are removed in manifest order; documents emptied
// this way are dropped with reason RECURRENT.
FilterOutcome recurrence_filter(const corpus::CorpusManifest& manifest,
                                uint32_t max_occurrences);

}  // namespace curator::dedup
