#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "curator/corpus.h"
#include "curator/loss_record.h"
#include "curator/tokenizer.h"

namespace curator::ngram {

// Interpolated Kneser-Ney with one fixed discount over a closed vocabulary
// (byte fallback upstream means no OOV mass is needed). Lower orders use
// continuation counts; contexts never seen back off entirely. Conditional
// distributions sum to one and every token keeps positive mass.

struct ScoredText {
  double nll_total = 0.0;  // nats
  uint64_t token_count = 0;
  uint64_t char_count = 0;
  uint64_t byte_count = 0;
  bool empty = true;
};

class NGramModel {
 public:
  static constexpr uint32_t kMaxOrder = 7;
  static constexpr uint32_t kMaxVocab = (1u << 18) - 2;

  class Trainer;

  static NGramModel train(const tokenizer::TokenSequence& stream,
                          uint32_t order, double discount,
                          uint32_t vocab_size);
  // Untrained smoothing limit: P(token | anything) = 1 / vocab_size.
  static NGramModel uniform(uint32_t vocab_size);

  uint32_t order() const { return order_; }
  double discount() const { return discount_; }
  uint32_t vocab_size() const { return vocab_size_; }

  // Smoothed conditional probability; context is the preceding tokens
  // (most recent last), shorter contexts are fine.
  double prob(uint32_t token, const std::vector<uint32_t>& context) const;
  // Maximum-likelihood estimate at the top order, no smoothing. Zero for
  // unseen events; meaningful only on degenerate fixtures.
  double ml_prob(uint32_t token, const std::vector<uint32_t>& context) const;

  // Per-token natural-log probabilities with begin-of-text padding.
  std::vector<double> token_logprobs(const tokenizer::TokenSequence& tokens) const;
  ScoredText logprob(const tokenizer::TokenSequence& tokens) const;
  ScoredText score_text(const tokenizer::Vocabulary& vocab,
                        const std::string& text) const;

  void save(const std::string& path) const;
  static NGramModel load(const std::string& path);

 private:
  friend class Trainer;
  struct Key {
    uint64_t hi = 0;
    uint64_t lo = 0;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    size_t operator()(const Key& k) const;
  };
  struct ContextStats {
    uint64_t total = 0;     // denominator
    uint64_t distinct = 0;  // continuation types, for the backoff weight
  };
  using CountMap = std::unordered_map<Key, uint64_t, KeyHash>;
  using ContextMap = std::unordered_map<Key, ContextStats, KeyHash>;

  static Key pack(const uint32_t* ids, size_t n);
  double prob_at_order(uint32_t k, const uint32_t* context_tail,
                       uint32_t token) const;
  void finalize_from_top_counts();

  uint32_t order_ = 1;
  double discount_ = 0.75;
  uint32_t vocab_size_ = 0;
  uint32_t bos_id_ = 0;
  // counts_[k-1]: numerator counts at order k (raw at the top order,
  // continuation counts below); contexts_[k-1]: per-context aggregates.
  std::vector<CountMap> counts_;
  std::vector<ContextMap> contexts_;
};

// Counts are order-independent, so training is deterministic regardless of
// how documents are sharded. BOS padding applies per added stream.
class NGramModel::Trainer {
 public:
  Trainer(uint32_t order, double discount, uint32_t vocab_size);
  void add(const tokenizer::TokenSequence& tokens);
  NGramModel build() &&;

 private:
  NGramModel model_;
  uint64_t positions_ = 0;
};

// Corpus-level loss: sum of per-document NLL over the chosen denominator.
monitor::LossRecord perplexity(const NGramModel& model,
                               const corpus::CorpusManifest& docs,
                               const tokenizer::Vocabulary& vocab,
                               monitor::Normalization normalization,
                               const std::string& model_id,
                               const std::string& domain);

// External-scorer interchange: one "%.17g" float per line (natural-log
// probability per token), documents separated by single blank lines. Lets
// any neural LM stand in for the built-in model.
void write_external_scores(const std::vector<std::vector<double>>& docs,
                           const std::string& path);
std::vector<std::vector<double>> read_external_scores(const std::string& path);

}  // namespace curator::ngram
