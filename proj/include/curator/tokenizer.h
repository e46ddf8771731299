#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "curator/corpus.h"

namespace curator::tokenizer {

// Four-part vocabulary: BPE-learned base (which houses the 256 byte tokens,
// so encoding is total), extension Chinese characters, extension Chinese
// words, and reserved symbols. Word-initial pieces carry a U+2581 marker in
// place of the space so decoding needs no detokenizer.

enum class Category { kLatinSubword, kZhChar, kZhWord, kReserved, kByte };
const char* to_string(Category v);

struct Entry {
  std::string piece;   // byte tokens use the "<0xNN>" surface form
  Category category = Category::kLatinSubword;
};

using TokenSequence = std::vector<uint32_t>;

struct MergeRule {
  std::string left;
  std::string right;
};

class Vocabulary {
 public:
  // base entries must contain all 256 "<0xNN>" byte tokens; no duplicate
  // piece across components; no user piece with two ASCII digits.
  static Vocabulary assemble(std::vector<std::string> base,
                             std::vector<MergeRule> merges,
                             std::vector<std::string> zh_chars,
                             std::vector<std::string> zh_words,
                             std::vector<std::string> reserved);

  // Just the byte alphabet; every input encodes to raw bytes.
  static Vocabulary byte_only();

  uint32_t size() const { return static_cast<uint32_t>(entries_.size()); }
  const std::vector<Entry>& entries() const { return entries_; }
  const std::vector<MergeRule>& merges() const { return merges_; }
  const Entry& entry(uint32_t id) const { return entries_[id]; }
  std::optional<uint32_t> find(std::string_view piece) const;
  uint32_t byte_id(uint8_t byte) const { return byte_ids_[byte]; }
  const std::vector<std::string>& user_pieces() const { return user_pieces_; }
  const std::unordered_map<std::string, uint32_t>& merge_ranks() const {
    return merge_rank_;
  }

  void save(const std::string& path) const;
  static Vocabulary load(const std::string& path);

 private:
  std::vector<Entry> entries_;
  std::vector<MergeRule> merges_;
  std::unordered_map<std::string, uint32_t> piece_to_id_;
  std::unordered_map<std::string, uint32_t> merge_rank_;  // "left\x01right"
  std::vector<std::string> user_pieces_;  // zh_char/zh_word/reserved, by length desc
  uint32_t byte_ids_[256] = {};
};

struct TrainedBase {
  std::vector<std::string> entries;  // bytes, then chars, then merge outputs
  std::vector<MergeRule> merges;
};

// Greedy highest-frequency pair merging from the byte/character alphabet,
// ties broken lexicographically, until target_size entries (or no pair
// occurs twice). Digits never merge; spaces become the U+2581 marker and
// merges stay within marker-delimited words.
TrainedBase train_bpe(const corpus::CorpusManifest& corpus_manifest,
                      uint32_t target_size);

// Total on any byte string: digit runs split per digit, user pieces matched
// greedily longest-first, the rest BPE-merged, anything else falls back to
// UTF-8 byte tokens.
TokenSequence encode(const Vocabulary& vocab, std::string_view text);

struct DecodeResult {
  std::string text;
  bool replaced_invalid_bytes = false;
};

DecodeResult decode(const Vocabulary& vocab, const TokenSequence& tokens);

}  // namespace curator::tokenizer
