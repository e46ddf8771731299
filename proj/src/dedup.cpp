#include "curator/dedup.h"

#include <algorithm>
#include <map>
#include <numeric>
#include <unordered_map>

#include "curator/errors.h"
#include "curator/kernels.h"
#include "curator/util/hash.h"
#include "curator/util/text.h"
#include "curator/util/utf8.h"

namespace curator::dedup {

ShingleSet shingle(std::string_view text, uint32_t k) {
  if (k < 1) throw UsageError("shingle length must be at least 1");
  ShingleSet set;
  set.k = k;
  const std::string normalized = util::collapse_whitespace(text);
  const std::vector<char32_t> cps = util::utf8_decode(normalized);
  if (cps.size() < k) return set;
  std::string window;
  for (size_t i = 0; i + k <= cps.size(); ++i) {
    window.clear();
    for (size_t j = 0; j < k; ++j) util::utf8_append(window, cps[i + j]);
    set.hashes.insert(util::hash64(window, 0x5368696e676c65ULL));
  }
  return set;
}

namespace {

// Affine permutation parameters for position i: odd multiplier + offset,
// both derived from (seed, i).
void fill_permutation_params(uint64_t seed, uint32_t num_hashes,
                             std::vector<uint64_t>& mul,
                             std::vector<uint64_t>& add) {
  mul.resize(num_hashes);
  add.resize(num_hashes);
  for (uint32_t i = 0; i < num_hashes; ++i) {
    mul[i] = util::splitmix64(seed * 0x9e3779b97f4a7c15ULL + 2 * i) | 1ULL;
    add[i] = util::splitmix64(seed * 0xc2b2ae3d27d4eb4fULL + 2 * i + 1);
  }
}

}  // namespace

MinHashSignature minhash(const ShingleSet& shingles, uint32_t num_hashes,
                         uint64_t seed) {
  if (num_hashes < 1) throw UsageError("num_hashes must be at least 1");
  MinHashSignature sig;
  sig.num_hashes = num_hashes;
  sig.seed = seed;
  sig.values.assign(num_hashes, MinHashSignature::kSentinel);
  std::vector<uint64_t> mul;
  std::vector<uint64_t> add;
  fill_permutation_params(seed, num_hashes, mul, add);
  for (uint64_t h : shingles.hashes)
    kernels::minhash_fold(h, mul, add, sig.values);
  return sig;
}

double jaccard_estimate(const MinHashSignature& a, const MinHashSignature& b) {
  if (a.num_hashes != b.num_hashes || a.seed != b.seed)
    throw UsageError("jaccard_estimate requires signatures with matching "
                     "num_hashes and seed");
  if (a.num_hashes == 0) return 0.0;
  const size_t matches = kernels::count_equal(a.values, b.values);
  return static_cast<double>(matches) / static_cast<double>(a.num_hashes);
}

namespace {

class UnionFind {
 public:
  explicit UnionFind(size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), size_t{0});
  }
  size_t find(size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(size_t a, size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);  // root at the smaller index
    parent_[b] = a;
  }

 private:
  std::vector<size_t> parent_;
};

bool signature_empty(const MinHashSignature& sig) {
  for (uint64_t v : sig.values)
    if (v != MinHashSignature::kSentinel) return false;
  return true;
}

}  // namespace

std::vector<std::vector<size_t>> lsh_group(
    const std::vector<MinHashSignature>& signatures, const LshParams& params) {
  if (signatures.empty()) return {};
  const uint32_t num_hashes = signatures.front().num_hashes;
  if (params.bands == 0 || params.rows == 0 ||
      params.bands * params.rows != num_hashes)
    throw UsageError("bands (" + std::to_string(params.bands) + ") x rows (" +
                     std::to_string(params.rows) + ") must equal num_hashes (" +
                     std::to_string(num_hashes) + ")");
  for (const auto& sig : signatures)
    if (sig.num_hashes != num_hashes || sig.seed != signatures.front().seed)
      throw UsageError("all signatures must share num_hashes and seed");

  // Band buckets -> candidate pairs, verified by estimate -> union-find.
  std::vector<std::pair<size_t, size_t>> candidates;
  std::unordered_map<uint64_t, std::vector<size_t>> buckets;
  for (uint32_t band = 0; band < params.bands; ++band) {
    buckets.clear();
    for (size_t i = 0; i < signatures.size(); ++i) {
      if (signature_empty(signatures[i])) continue;
      const uint64_t key = util::hash64(
          signatures[i].values.data() + band * params.rows,
          params.rows * sizeof(uint64_t), band + 1);
      buckets[key].push_back(i);
    }
    for (const auto& [key, members] : buckets) {
      for (size_t a = 0; a + 1 < members.size(); ++a)
        for (size_t b = a + 1; b < members.size(); ++b)
          candidates.emplace_back(members[a], members[b]);
    }
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()),
                   candidates.end());

  UnionFind uf(signatures.size());
  for (const auto& [a, b] : candidates) {
    if (jaccard_estimate(signatures[a], signatures[b]) >= params.threshold)
      uf.unite(a, b);
  }

  std::map<size_t, std::vector<size_t>> groups;
  for (size_t i = 0; i < signatures.size(); ++i)
    groups[uf.find(i)].push_back(i);
  std::vector<std::vector<size_t>> out;
  for (auto& [root, members] : groups)
    if (members.size() >= 2) out.push_back(std::move(members));
  return out;
}

FilterOutcome drop_near_duplicates(const corpus::CorpusManifest& manifest,
                                   const DedupParams& params) {
  std::vector<MinHashSignature> signatures(manifest.size());
  for (size_t i = 0; i < manifest.size(); ++i)
    signatures[i] = minhash(shingle(manifest.documents[i].text,
                                    params.shingle_k),
                            params.num_hashes, params.seed);
  const auto groups = lsh_group(signatures, params.lsh);
  std::vector<char> drop(manifest.size(), 0);
  for (const auto& group : groups)
    for (size_t j = 1; j < group.size(); ++j) drop[group[j]] = 1;

  FilterOutcome outcome;
  for (size_t i = 0; i < manifest.size(); ++i) {
    if (!drop[i]) {
      outcome.kept.documents.push_back(manifest.documents[i]);
      continue;
    }
    corpus::Document doc = manifest.documents[i];
    if (!doc.annotations) doc.annotations.emplace();
    doc.annotations->drop_reasons.push_back(corpus::DropReason::kNearDup);
    outcome.dropped.push_back(std::move(doc));
  }
  return outcome;
}

FilterOutcome recurrence_filter(const corpus::CorpusManifest& manifest,
                                uint32_t max_occurrences) {
  if (max_occurrences < 1)
    throw UsageError("max_occurrences must be at least 1");

  // First pass: corpus-wide occurrence counts of normalized paragraphs.
  std::unordered_map<uint64_t, uint64_t> counts;
  for (const auto& doc : manifest.documents) {
    for (const auto& para : util::split_paragraphs(doc.text)) {
      const std::string norm = util::collapse_whitespace(para);
      if (norm.empty()) continue;
      counts[util::hash64(norm, 0x706172610a5eULL)] += 1;
    }
  }

  // Second pass: keep the first max_occurrences of each over-recurring one.
  std::unordered_map<uint64_t, uint64_t> seen;
  FilterOutcome outcome;
  for (const auto& doc : manifest.documents) {
    std::string rebuilt;
    bool changed = false;
    for (const auto& para : util::split_paragraphs(doc.text)) {
      const std::string norm = util::collapse_whitespace(para);
      if (norm.empty()) continue;
      const uint64_t h = util::hash64(norm, 0x706172610a5eULL);
      bool keep = true;
      if (counts[h] > max_occurrences) {
        const uint64_t rank = ++seen[h];
        keep = rank <= max_occurrences;
      }
      if (!keep) {
        changed = true;
        continue;
      }
      if (!rebuilt.empty()) rebuilt += "\n\n";
      rebuilt += para;
    }
    corpus::Document out = doc;
    if (changed) {
      out.text = std::move(rebuilt);
      recompute_lengths(out);
    }
    if (out.text.empty() && !doc.text.empty()) {
      if (!out.annotations) out.annotations.emplace();
      out.annotations->drop_reasons.push_back(corpus::DropReason::kRecurrent);
      outcome.dropped.push_back(std::move(out));
    } else {
      outcome.kept.documents.push_back(std::move(out));
    }
  }
  return outcome;
}

}  // namespace curator::dedup
