#include "curator/ngram.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

#include "curator/errors.h"
#include "curator/util/binio.h"
#include "curator/util/hash.h"
#include "curator/util/utf8.h"

namespace curator::ngram {

size_t NGramModel::KeyHash::operator()(const Key& k) const {
  return static_cast<size_t>(
      util::splitmix64(k.hi * 0x9e3779b97f4a7c15ULL ^ k.lo));
}

// 18 bits per id (vocab_size plus the BOS sentinel fit), up to 7 ids per
// key. Lengths are implied by which per-order map a key lives in.
NGramModel::Key NGramModel::pack(const uint32_t* ids, size_t n) {
  Key key;
  for (size_t i = 0; i < n; ++i) {
    key.hi = (key.hi << 18) | (key.lo >> 46);
    key.lo = (key.lo << 18) | ids[i];
  }
  return key;
}

namespace {

void unpack_key(uint64_t hi, uint64_t lo, uint32_t* ids, size_t n) {
  for (size_t i = n; i-- > 0;) {
    ids[i] = static_cast<uint32_t>(lo & 0x3FFFF);
    lo = (lo >> 18) | (hi << 46);
    hi >>= 18;
  }
}

}  // namespace

NGramModel::Trainer::Trainer(uint32_t order, double discount,
                             uint32_t vocab_size) {
  if (order < 1 || order > kMaxOrder)
    throw UsageError("order must be in [1, " + std::to_string(kMaxOrder) +
                     "]");
  if (!(discount > 0.0 && discount < 1.0))
    throw UsageError("discount must be in (0, 1)");
  if (vocab_size == 0 || vocab_size > kMaxVocab)
    throw UsageError("vocab_size must be in [1, " + std::to_string(kMaxVocab) +
                     "]");
  model_.order_ = order;
  model_.discount_ = discount;
  model_.vocab_size_ = vocab_size;
  model_.bos_id_ = vocab_size;  // sentinel, only ever appears in contexts
  model_.counts_.assign(order, CountMap{});
  model_.contexts_.assign(order, ContextMap{});
}

void NGramModel::Trainer::add(const tokenizer::TokenSequence& tokens) {
  const uint32_t n = model_.order_;
  std::vector<uint32_t> window;  // context + token at the top order
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i] >= model_.vocab_size_)
      throw UsageError("token id " + std::to_string(tokens[i]) +
                       " out of range for vocab_size " +
                       std::to_string(model_.vocab_size_));
    window.clear();
    for (size_t back = n - 1; back > 0; --back) {
      if (i >= back)
        window.push_back(tokens[i - back]);
      else
        window.push_back(model_.bos_id_);
    }
    window.push_back(tokens[i]);
    model_.counts_[n - 1][pack(window.data(), n)] += 1;
    ++positions_;
  }
}

NGramModel NGramModel::Trainer::build() && {
  if (positions_ == 0) throw UsageError("training stream is empty");
  model_.finalize_from_top_counts();
  return std::move(model_);
}

void NGramModel::finalize_from_top_counts() {
  const uint32_t n = order_;
  // Lower-order numerators are continuation counts: the number of distinct
  // (k+1)-grams that end in the k-gram.
  for (uint32_t k = n; k >= 1; --k) {
    CountMap& grams = counts_[k - 1];
    if (k < n) {
      grams.clear();
      std::vector<uint32_t> full(k + 1);
      for (const auto& [key, count] : counts_[k]) {
        unpack_key(key.hi, key.lo, full.data(), k + 1);
        grams[pack(full.data() + 1, k)] += 1;
      }
    }
    ContextMap& ctx = contexts_[k - 1];
    ctx.clear();
    std::vector<uint32_t> full(k);
    for (const auto& [key, count] : grams) {
      unpack_key(key.hi, key.lo, full.data(), k);
      ContextStats& stats = ctx[pack(full.data(), k - 1)];
      stats.total += count;
      stats.distinct += 1;
    }
  }
}

NGramModel NGramModel::train(const tokenizer::TokenSequence& stream,
                             uint32_t order, double discount,
                             uint32_t vocab_size) {
  Trainer trainer(order, discount, vocab_size);
  trainer.add(stream);
  return std::move(trainer).build();
}

NGramModel NGramModel::uniform(uint32_t vocab_size) {
  if (vocab_size == 0 || vocab_size > kMaxVocab)
    throw UsageError("vocab_size must be positive");
  NGramModel model;
  model.order_ = 1;
  model.discount_ = 0.75;
  model.vocab_size_ = vocab_size;
  model.bos_id_ = vocab_size;
  model.counts_.assign(1, CountMap{});
  model.contexts_.assign(1, ContextMap{});
  return model;
}

double NGramModel::prob_at_order(uint32_t k, const uint32_t* context_tail,
                                 uint32_t token) const {
  if (k == 0) return 1.0 / static_cast<double>(vocab_size_);
  // context_tail points at the k-1 ids preceding the token.
  const Key ctx_key = pack(context_tail, k - 1);
  const auto ctx_it = contexts_[k - 1].find(ctx_key);
  if (ctx_it == contexts_[k - 1].end() || ctx_it->second.total == 0)
    return prob_at_order(k - 1, context_tail + 1, token);

  std::vector<uint32_t> gram(context_tail, context_tail + (k - 1));
  gram.push_back(token);
  const auto gram_it = counts_[k - 1].find(pack(gram.data(), k));
  const double num =
      gram_it == counts_[k - 1].end() ? 0.0
                                      : static_cast<double>(gram_it->second);
  const double total = static_cast<double>(ctx_it->second.total);
  const double distinct = static_cast<double>(ctx_it->second.distinct);
  const double lower = prob_at_order(k - 1, context_tail + 1, token);
  return (std::max(num - discount_, 0.0) + discount_ * distinct * lower) /
         total;
}

double NGramModel::prob(uint32_t token,
                        const std::vector<uint32_t>& context) const {
  if (token >= vocab_size_)
    throw UsageError("token id out of range");
  const uint32_t n = order_;
  std::vector<uint32_t> padded;
  padded.reserve(n - 1);
  for (size_t back = n - 1; back > 0; --back) {
    if (context.size() >= back)
      padded.push_back(context[context.size() - back]);
    else
      padded.push_back(bos_id_);
  }
  return prob_at_order(n, padded.data(), token);
}

double NGramModel::ml_prob(uint32_t token,
                           const std::vector<uint32_t>& context) const {
  const uint32_t n = order_;
  std::vector<uint32_t> padded;
  for (size_t back = n - 1; back > 0; --back) {
    if (context.size() >= back)
      padded.push_back(context[context.size() - back]);
    else
      padded.push_back(bos_id_);
  }
  const auto ctx_it = contexts_[n - 1].find(pack(padded.data(), n - 1));
  if (ctx_it == contexts_[n - 1].end() || ctx_it->second.total == 0)
    return 0.0;
  padded.push_back(token);
  const auto gram_it = counts_[n - 1].find(pack(padded.data(), n));
  if (gram_it == counts_[n - 1].end()) return 0.0;
  return static_cast<double>(gram_it->second) /
         static_cast<double>(ctx_it->second.total);
}

std::vector<double> NGramModel::token_logprobs(
    const tokenizer::TokenSequence& tokens) const {
  std::vector<double> out;
  out.reserve(tokens.size());
  const uint32_t n = order_;
  std::vector<uint32_t> window(n > 0 ? n - 1 : 0);
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i] >= vocab_size_)
      throw UsageError("token id " + std::to_string(tokens[i]) +
                       " out of range for vocab_size " +
                       std::to_string(vocab_size_));
    for (size_t back = n - 1, j = 0; back > 0; --back, ++j)
      window[j] = i >= back ? tokens[i - back] : bos_id_;
    out.push_back(std::log(prob_at_order(n, window.data(), tokens[i])));
  }
  return out;
}

ScoredText NGramModel::logprob(const tokenizer::TokenSequence& tokens) const {
  ScoredText scored;
  if (tokens.empty()) return scored;
  const std::vector<double> lps = token_logprobs(tokens);
  for (double lp : lps) scored.nll_total -= lp;
  scored.token_count = tokens.size();
  scored.empty = false;
  return scored;
}

ScoredText NGramModel::score_text(const tokenizer::Vocabulary& vocab,
                                  const std::string& text) const {
  ScoredText scored = logprob(tokenizer::encode(vocab, text));
  scored.byte_count = text.size();
  scored.char_count = util::utf8_length(text);
  return scored;
}

monitor::LossRecord perplexity(const NGramModel& model,
                               const corpus::CorpusManifest& docs,
                               const tokenizer::Vocabulary& vocab,
                               monitor::Normalization normalization,
                               const std::string& model_id,
                               const std::string& domain) {
  if (docs.empty())
    throw UsageError("perplexity requires a non-empty manifest");
  double nll = 0.0;
  uint64_t denom = 0;
  for (const auto& doc : docs.documents) {
    const ScoredText scored = model.score_text(vocab, doc.text);
    nll += scored.nll_total;
    switch (normalization) {
      case monitor::Normalization::kPerToken: denom += scored.token_count; break;
      case monitor::Normalization::kPerChar: denom += scored.char_count; break;
      case monitor::Normalization::kPerByte: denom += scored.byte_count; break;
    }
  }
  if (denom == 0)
    throw UsageError("perplexity denominator is zero (all documents empty)");
  monitor::LossRecord record;
  record.model_id = model_id;
  record.domain = domain;
  record.normalization = normalization;
  record.loss = nll / static_cast<double>(denom);
  return record;
}

// --- persistence -----------------------------------------------------------

namespace {
constexpr char kModelMagic[] = "CKNG0001";
}

void NGramModel::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write model: " + path);
  out.write(kModelMagic, 8);
  util::put_u32(out, order_);
  util::put_f64(out, discount_);
  util::put_u64(out, vocab_size_);
  for (uint32_t k = 1; k <= order_; ++k) {
    const CountMap& grams = counts_[k - 1];
    // Canonical order so identical models produce identical bytes.
    std::vector<std::pair<Key, uint64_t>> sorted(grams.begin(), grams.end());
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
      return std::tie(a.first.lo, a.first.hi) <
             std::tie(b.first.lo, b.first.hi);
    });
    util::put_u64(out, sorted.size());
    for (const auto& [key, count] : sorted) {
      util::put_u64(out, key.hi);
      util::put_u64(out, key.lo);
      util::put_u64(out, count);
    }
  }
  if (!out) throw DataError("write failure: " + path);
}

NGramModel NGramModel::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model: " + path);
  util::expect_magic(in, kModelMagic, 8);
  NGramModel model;
  model.order_ = util::get_u32(in);
  model.discount_ = util::get_f64(in);
  model.vocab_size_ = static_cast<uint32_t>(util::get_u64(in));
  if (model.order_ < 1 || model.order_ > kMaxOrder)
    throw ParseError("model order out of range");
  model.bos_id_ = model.vocab_size_;
  model.counts_.assign(model.order_, CountMap{});
  model.contexts_.assign(model.order_, ContextMap{});
  for (uint32_t k = 1; k <= model.order_; ++k) {
    const uint64_t entries = util::get_u64(in);
    CountMap& grams = model.counts_[k - 1];
    grams.reserve(entries);
    for (uint64_t i = 0; i < entries; ++i) {
      Key key;
      key.hi = util::get_u64(in);
      key.lo = util::get_u64(in);
      grams[key] = util::get_u64(in);
    }
  }
  // All numerators were stored; rebuild just the per-context aggregates.
  for (uint32_t k = 1; k <= model.order_; ++k) {
    ContextMap& ctx = model.contexts_[k - 1];
    std::vector<uint32_t> full(k);
    for (const auto& [key, count] : model.counts_[k - 1]) {
      unpack_key(key.hi, key.lo, full.data(), k);
      ContextStats& stats = ctx[pack(full.data(), k - 1)];
      stats.total += count;
      stats.distinct += 1;
    }
  }
  return model;
}

// --- external scores interchange --------------------------------------------

void write_external_scores(const std::vector<std::vector<double>>& docs,
                           const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write scores: " + path);
  char buf[64];
  bool first = true;
  for (const auto& doc : docs) {
    if (!first) out << '\n';
    first = false;
    for (double lp : doc) {
      std::snprintf(buf, sizeof(buf), "%.17g", lp);
      out << buf << '\n';
    }
  }
  if (!out) throw DataError("write failure: " + path);
}

std::vector<std::vector<double>> read_external_scores(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open scores: " + path);
  std::vector<std::vector<double>> docs;
  docs.emplace_back();
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) {
      docs.emplace_back();
      continue;
    }
    char* end = nullptr;
    const double v = std::strtod(line.c_str(), &end);
    if (end == line.c_str() || *end != '\0')
      throw ParseError("scores line " + std::to_string(line_no) +
                       ": not a number: '" + line + "'");
    docs.back().push_back(v);
  }
  if (!docs.empty() && docs.back().empty()) docs.pop_back();
  return docs;
}

}  // namespace curator::ngram
