#include "curator/tokenizer.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <queue>
#include <set>

#include "curator/errors.h"
#include "curator/util/utf8.h"

namespace curator::tokenizer {

namespace {

constexpr char32_t kSpaceMarker = 0x2581;  // '▁'

std::string byte_surface(uint8_t b) {
  char buf[8];
  std::snprintf(buf, sizeof(buf), "<0x%02X>", b);
  return buf;
}

std::optional<uint8_t> parse_byte_surface(std::string_view piece) {
  if (piece.size() != 6 || piece.substr(0, 3) != "<0x" || piece[5] != '>')
    return std::nullopt;
  uint8_t value = 0;
  for (char c : piece.substr(3, 2)) {
    value = static_cast<uint8_t>(value << 4);
    if (c >= '0' && c <= '9') value |= static_cast<uint8_t>(c - '0');
    else if (c >= 'A' && c <= 'F') value |= static_cast<uint8_t>(c - 'A' + 10);
    else return std::nullopt;
  }
  return value;
}

int ascii_digit_count(std::string_view piece) {
  int digits = 0;
  for (char c : piece)
    if (c >= '0' && c <= '9') ++digits;
  return digits;
}

std::string merge_key(std::string_view left, std::string_view right) {
  std::string key;
  key.reserve(left.size() + right.size() + 1);
  key += left;
  key += '\x01';
  key += right;
  return key;
}

// One pre-tokenized unit of transformed text.
struct Segment {
  std::string text;       // UTF-8, spaces already turned into the marker
  enum Kind { kWord, kDigit, kRawByte, kUserToken } kind = kWord;
  uint32_t user_id = 0;   // for kUserToken
  uint8_t byte = 0;       // for kRawByte
};

// Shared by training and encoding: marker substitution, digit isolation,
// byte fallback for invalid UTF-8 and literal marker characters. When
// `vocab` is given, user pieces are matched greedily longest-first.
std::vector<Segment> pre_tokenize(std::string_view text,
                                  const Vocabulary* vocab) {
  struct Cp {
    char32_t cp;
    bool raw_byte;  // emit as byte fallback, never part of a match
  };
  std::vector<Cp> cps;
  cps.reserve(text.size());
  for (size_t pos = 0; pos < text.size();) {
    const util::Utf8Step step = util::utf8_next(text, pos);
    pos += static_cast<size_t>(step.len);
    if (!step.valid) {
      cps.push_back({step.cp, true});
    } else if (step.cp == ' ') {
      cps.push_back({kSpaceMarker, false});
    } else if (step.cp == kSpaceMarker) {
      // A literal marker must not collide with the space convention.
      cps.push_back({step.cp, true});
    } else {
      cps.push_back({step.cp, false});
    }
  }

  // User pieces decoded once, grouped by first code point, longest first.
  struct UserPiece {
    std::vector<char32_t> cps;
    uint32_t id;
  };
  std::unordered_map<char32_t, std::vector<UserPiece>> user_index;
  if (vocab != nullptr) {
    for (const std::string& piece : vocab->user_pieces()) {
      UserPiece up;
      up.cps = util::utf8_decode(piece);
      up.id = *vocab->find(piece);
      if (!up.cps.empty()) user_index[up.cps[0]].push_back(std::move(up));
    }
    for (auto& [cp, list] : user_index)
      std::stable_sort(list.begin(), list.end(),
                       [](const UserPiece& a, const UserPiece& b) {
                         return a.cps.size() > b.cps.size();
                       });
  }

  std::vector<Segment> segments;
  std::string word;
  auto flush_word = [&] {
    if (!word.empty()) {
      segments.push_back({std::move(word), Segment::kWord, 0, 0});
      word.clear();
    }
  };

  size_t i = 0;
  while (i < cps.size()) {
    const Cp& c = cps[i];
    if (c.raw_byte) {
      flush_word();
      std::string encoded;
      if (c.cp == kSpaceMarker) {
        util::utf8_append(encoded, kSpaceMarker);  // literal marker chars
      } else {
        encoded.push_back(static_cast<char>(c.cp));  // one invalid byte
      }
      for (unsigned char b : encoded)
        segments.push_back({std::string(), Segment::kRawByte, 0, b});
      ++i;
      continue;
    }
    if (c.cp >= '0' && c.cp <= '9') {
      // Digit isolation has priority over everything else.
      flush_word();
      Segment seg;
      seg.kind = Segment::kDigit;
      seg.text.push_back(static_cast<char>(c.cp));
      segments.push_back(std::move(seg));
      ++i;
      continue;
    }
    if (vocab != nullptr) {
      auto it = user_index.find(c.cp);
      bool matched = false;
      if (it != user_index.end()) {
        for (const UserPiece& up : it->second) {
          if (i + up.cps.size() > cps.size()) continue;
          bool ok = true;
          for (size_t k = 0; k < up.cps.size(); ++k) {
            if (cps[i + k].raw_byte || cps[i + k].cp != up.cps[k]) {
              ok = false;
              break;
            }
          }
          if (ok) {
            flush_word();
            segments.push_back({std::string(), Segment::kUserToken, up.id, 0});
            i += up.cps.size();
            matched = true;
            break;
          }
        }
      }
      if (matched) continue;
    }
    if (c.cp == kSpaceMarker && !word.empty()) flush_word();
    util::utf8_append(word, c.cp);
    ++i;
  }
  flush_word();
  return segments;
}

Category category_from_string(const std::string& s) {
  if (s == "latin_subword") return Category::kLatinSubword;
  if (s == "zh_char") return Category::kZhChar;
  if (s == "zh_word") return Category::kZhWord;
  if (s == "reserved") return Category::kReserved;
  if (s == "byte") return Category::kByte;
  throw ParseError("unknown vocabulary category: " + s);
}

}  // namespace

const char* to_string(Category v) {
  switch (v) {
    case Category::kLatinSubword: return "latin_subword";
    case Category::kZhChar: return "zh_char";
    case Category::kZhWord: return "zh_word";
    case Category::kReserved: return "reserved";
    case Category::kByte: return "byte";
  }
  return "?";
}

Vocabulary Vocabulary::assemble(std::vector<std::string> base,
                                std::vector<MergeRule> merges,
                                std::vector<std::string> zh_chars,
                                std::vector<std::string> zh_words,
                                std::vector<std::string> reserved) {
  Vocabulary vocab;
  vocab.merges_ = std::move(merges);

  auto add = [&vocab](const std::string& piece, Category category) {
    if (piece.empty())
      throw IntegrityError("empty token string in vocabulary");
    const auto [it, inserted] =
        vocab.piece_to_id_.emplace(piece, vocab.size());
    if (!inserted)
      throw IntegrityError("duplicate token across vocabulary components: '" +
                           piece + "'");
    vocab.entries_.push_back({piece, category});
  };

  for (const std::string& piece : base) {
    const auto byte = parse_byte_surface(piece);
    add(piece, byte ? Category::kByte : Category::kLatinSubword);
  }
  auto add_user = [&](const std::vector<std::string>& pieces, Category cat) {
    for (const std::string& piece : pieces) {
      if (ascii_digit_count(piece) >= 2)
        throw IntegrityError("token '" + piece +
                             "' would break digit splitting");
      add(piece, cat);
    }
  };
  add_user(zh_chars, Category::kZhChar);
  add_user(zh_words, Category::kZhWord);
  add_user(reserved, Category::kReserved);

  bool have_byte[256] = {};
  for (uint32_t id = 0; id < vocab.size(); ++id) {
    if (vocab.entries_[id].category != Category::kByte) continue;
    const auto byte = parse_byte_surface(vocab.entries_[id].piece);
    vocab.byte_ids_[*byte] = id;
    have_byte[*byte] = true;
  }
  for (int b = 0; b < 256; ++b)
    if (!have_byte[b])
      throw IntegrityError("vocabulary is missing byte token " +
                           byte_surface(static_cast<uint8_t>(b)));

  for (size_t rank = 0; rank < vocab.merges_.size(); ++rank)
    vocab.merge_rank_.emplace(
        merge_key(vocab.merges_[rank].left, vocab.merges_[rank].right),
        static_cast<uint32_t>(rank));

  for (const Entry& e : vocab.entries_)
    if (e.category == Category::kZhChar || e.category == Category::kZhWord ||
        e.category == Category::kReserved)
      vocab.user_pieces_.push_back(e.piece);
  return vocab;
}

Vocabulary Vocabulary::byte_only() {
  std::vector<std::string> base;
  base.reserve(256);
  for (int b = 0; b < 256; ++b)
    base.push_back(byte_surface(static_cast<uint8_t>(b)));
  return assemble(std::move(base), {}, {}, {}, {});
}

std::optional<uint32_t> Vocabulary::find(std::string_view piece) const {
  const auto it = piece_to_id_.find(std::string(piece));
  if (it == piece_to_id_.end()) return std::nullopt;
  return it->second;
}

// --- persistence -----------------------------------------------------------

namespace {

std::string escape_piece(std::string_view piece) {
  std::string out;
  out.reserve(piece.size());
  for (char c : piece) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      default: out += c;
    }
  }
  return out;
}

std::string unescape_piece(std::string_view s, size_t line_no) {
  std::string out;
  out.reserve(s.size());
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '\\') {
      out += s[i];
      continue;
    }
    if (i + 1 >= s.size())
      throw ParseError("line " + std::to_string(line_no) +
                       ": dangling escape");
    ++i;
    switch (s[i]) {
      case '\\': out += '\\'; break;
      case 't': out += '\t'; break;
      case 'n': out += '\n'; break;
      case 'r': out += '\r'; break;
      default:
        throw ParseError("line " + std::to_string(line_no) +
                         ": bad escape \\" + std::string(1, s[i]));
    }
  }
  return out;
}

std::vector<std::string> split_tabs(std::string_view line) {
  std::vector<std::string> fields;
  size_t start = 0;
  for (size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == '\t') {
      fields.emplace_back(line.substr(start, i - start));
      start = i + 1;
    }
  }
  return fields;
}

}  // namespace

void Vocabulary::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write vocabulary: " + path);
  for (uint32_t id = 0; id < size(); ++id)
    out << escape_piece(entries_[id].piece) << '\t'
        << to_string(entries_[id].category) << '\t' << id << '\n';
  out << "#merges\n";
  for (const MergeRule& m : merges_)
    out << escape_piece(m.left) << '\t' << escape_piece(m.right) << '\n';
  if (!out) throw DataError("write failure: " + path);
}

Vocabulary Vocabulary::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open vocabulary: " + path);
  std::vector<std::string> base;
  std::vector<std::string> zh_chars;
  std::vector<std::string> zh_words;
  std::vector<std::string> reserved;
  std::vector<MergeRule> merges;
  std::string line;
  size_t line_no = 0;
  bool in_merges = false;
  uint32_t expected_id = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line == "#merges") {
      in_merges = true;
      continue;
    }
    const auto fields = split_tabs(line);
    if (in_merges) {
      if (fields.size() != 2)
        throw ParseError("line " + std::to_string(line_no) +
                         ": merge rule needs two fields");
      merges.push_back({unescape_piece(fields[0], line_no),
                        unescape_piece(fields[1], line_no)});
      continue;
    }
    if (fields.size() != 3)
      throw ParseError("line " + std::to_string(line_no) +
                       ": entry needs three fields");
    const std::string piece = unescape_piece(fields[0], line_no);
    const Category category = category_from_string(fields[1]);
    if (std::to_string(expected_id) != fields[2])
      throw ParseError("line " + std::to_string(line_no) +
                       ": ids must be consecutive from 0");
    ++expected_id;
    switch (category) {
      case Category::kLatinSubword:
      case Category::kByte:
        base.push_back(piece);
        break;
      case Category::kZhChar: zh_chars.push_back(piece); break;
      case Category::kZhWord: zh_words.push_back(piece); break;
      case Category::kReserved: reserved.push_back(piece); break;
    }
  }
  return assemble(std::move(base), std::move(merges), std::move(zh_chars),
                  std::move(zh_words), std::move(reserved));
}

// --- training ----------------------------------------------------------------

TrainedBase train_bpe(const corpus::CorpusManifest& corpus_manifest,
                      uint32_t target_size) {
  if (target_size <= 256)
    throw UsageError("target_size must exceed the 256-byte alphabet");
  if (corpus_manifest.empty())
    throw UsageError("BPE training requires a non-empty corpus");

  // Segment frequency table over the whole corpus.
  std::map<std::string, uint64_t> segment_counts;
  std::map<std::string, uint64_t> char_counts;  // UTF-8 of one cp -> count
  for (const auto& doc : corpus_manifest.documents) {
    for (const Segment& seg : pre_tokenize(doc.text, nullptr)) {
      if (seg.kind != Segment::kWord) continue;
      segment_counts[seg.text] += 1;
    }
  }
  for (const auto& [segment, count] : segment_counts) {
    for (size_t pos = 0; pos < segment.size();) {
      const util::Utf8Step step = util::utf8_next(segment, pos);
      char_counts[segment.substr(pos, static_cast<size_t>(step.len))] += count;
      pos += static_cast<size_t>(step.len);
    }
  }

  TrainedBase out;
  for (int b = 0; b < 256; ++b)
    out.entries.push_back(byte_surface(static_cast<uint8_t>(b)));

  // Single characters by frequency (ties by string order), as many as fit.
  std::vector<std::pair<std::string, uint64_t>> chars(char_counts.begin(),
                                                      char_counts.end());
  std::stable_sort(chars.begin(), chars.end(),
                   [](const auto& a, const auto& b) {
                     if (a.second != b.second) return a.second > b.second;
                     return a.first < b.first;
                   });
  std::map<std::string, uint32_t> symbol_ids;
  std::vector<std::string> symbols;
  for (const auto& [ch, count] : chars) {
    if (out.entries.size() >= target_size) break;
    out.entries.push_back(ch);
    symbol_ids[ch] = static_cast<uint32_t>(symbols.size());
    symbols.push_back(ch);
  }

  struct Work {
    std::vector<uint32_t> syms;
    uint64_t count;
  };
  std::vector<Work> work;
  work.reserve(segment_counts.size());
  for (const auto& [segment, count] : segment_counts) {
    Work w;
    w.count = count;
    bool usable = true;
    for (size_t pos = 0; pos < segment.size();) {
      const util::Utf8Step step = util::utf8_next(segment, pos);
      const std::string ch =
          segment.substr(pos, static_cast<size_t>(step.len));
      pos += static_cast<size_t>(step.len);
      const auto it = symbol_ids.find(ch);
      if (it == symbol_ids.end()) {
        usable = false;  // char beyond the alphabet budget; byte fallback
        break;
      }
      w.syms.push_back(it->second);
    }
    if (usable && w.syms.size() >= 2) work.push_back(std::move(w));
  }

  std::set<std::string> entry_set(out.entries.begin(), out.entries.end());
  while (out.entries.size() < target_size) {
    std::map<std::pair<uint32_t, uint32_t>, uint64_t> pair_counts;
    for (const Work& w : work)
      for (size_t i = 0; i + 1 < w.syms.size(); ++i)
        pair_counts[{w.syms[i], w.syms[i + 1]}] += w.count;

    // Best by count, ties by lexicographic (left, right) strings.
    uint64_t best_count = 0;
    std::pair<uint32_t, uint32_t> best{0, 0};
    for (const auto& [pair, count] : pair_counts) {
      if (count < 2 || count < best_count) continue;
      if (count > best_count) {
        best_count = count;
        best = pair;
        continue;
      }
      if (std::tie(symbols[pair.first], symbols[pair.second]) <
          std::tie(symbols[best.first], symbols[best.second]))
        best = pair;
    }
    if (best_count < 2) break;

    const std::string merged = symbols[best.first] + symbols[best.second];
    out.merges.push_back({symbols[best.first], symbols[best.second]});
    uint32_t merged_id;
    const auto it = symbol_ids.find(merged);
    if (it != symbol_ids.end()) {
      merged_id = it->second;
    } else {
      merged_id = static_cast<uint32_t>(symbols.size());
      symbols.push_back(merged);
      symbol_ids[merged] = merged_id;
    }
    if (entry_set.insert(merged).second) out.entries.push_back(merged);

    for (Work& w : work) {
      std::vector<uint32_t> next;
      next.reserve(w.syms.size());
      for (size_t i = 0; i < w.syms.size();) {
        if (i + 1 < w.syms.size() && w.syms[i] == best.first &&
            w.syms[i + 1] == best.second) {
          next.push_back(merged_id);
          i += 2;
        } else {
          next.push_back(w.syms[i]);
          ++i;
        }
      }
      w.syms = std::move(next);
    }
  }
  return out;
}

// --- encode / decode ---------------------------------------------------------

namespace {

// Lowest-rank-first bigram merging over one word segment (linked list +
// priority queue, O(L log L)).
std::vector<std::string> apply_merges(
    const std::string& segment,
    const std::unordered_map<std::string, uint32_t>& merge_rank) {
  struct Node {
    size_t begin;
    size_t end;  // [begin, end) byte range in segment
    size_t prev;
    size_t next;
    bool alive = true;
  };
  static constexpr size_t kNone = ~size_t{0};
  std::vector<Node> nodes;
  for (size_t pos = 0; pos < segment.size();) {
    const util::Utf8Step step = util::utf8_next(segment, pos);
    const size_t len = static_cast<size_t>(step.len);
    const size_t idx = nodes.size();
    nodes.push_back({pos, pos + len, idx == 0 ? kNone : idx - 1, idx + 1,
                     true});
    pos += len;
  }
  if (!nodes.empty()) nodes.back().next = kNone;

  struct Candidate {
    uint32_t rank;
    size_t left;
    size_t right;
    size_t left_size;
    size_t right_size;
    bool operator>(const Candidate& other) const {
      if (rank != other.rank) return rank > other.rank;
      return left > other.left;
    }
  };
  std::priority_queue<Candidate, std::vector<Candidate>, std::greater<>> queue;

  auto push_candidate = [&](size_t left, size_t right) {
    if (left == kNone || right == kNone) return;
    const auto piece = [&](const Node& n) {
      return std::string_view(segment).substr(n.begin, n.end - n.begin);
    };
    const auto it = merge_rank.find(merge_key(piece(nodes[left]),
                                              piece(nodes[right])));
    if (it == merge_rank.end()) return;
    queue.push({it->second, left, right, nodes[left].end - nodes[left].begin,
                nodes[right].end - nodes[right].begin});
  };

  for (size_t i = 0; i + 1 < nodes.size(); ++i) push_candidate(i, i + 1);

  while (!queue.empty()) {
    const Candidate c = queue.top();
    queue.pop();
    if (!nodes[c.left].alive || !nodes[c.right].alive) continue;
    if (nodes[c.left].next != c.right) continue;
    if (nodes[c.left].end - nodes[c.left].begin != c.left_size ||
        nodes[c.right].end - nodes[c.right].begin != c.right_size)
      continue;
    nodes[c.left].end = nodes[c.right].end;
    nodes[c.right].alive = false;
    nodes[c.left].next = nodes[c.right].next;
    if (nodes[c.right].next != kNone) nodes[nodes[c.right].next].prev = c.left;
    push_candidate(nodes[c.left].prev, c.left);
    push_candidate(c.left, nodes[c.left].next);
  }

  std::vector<std::string> pieces;
  for (const Node& n : nodes) {
    if (!n.alive) continue;
    pieces.push_back(segment.substr(n.begin, n.end - n.begin));
  }
  return pieces;
}

void append_piece_ids(const Vocabulary& vocab, const std::string& piece,
                      TokenSequence& out) {
  if (const auto id = vocab.find(piece)) {
    out.push_back(*id);
    return;
  }
  // Byte fallback bypasses the decode-side marker mapping, so markers in
  // word pieces (always transformed spaces) become space bytes here.
  for (size_t pos = 0; pos < piece.size();) {
    const util::Utf8Step step = util::utf8_next(piece, pos);
    pos += static_cast<size_t>(step.len);
    if (step.valid && step.cp == kSpaceMarker) {
      out.push_back(vocab.byte_id(' '));
    } else if (step.valid) {
      std::string encoded;
      util::utf8_append(encoded, step.cp);
      for (unsigned char b : encoded) out.push_back(vocab.byte_id(b));
    } else {
      out.push_back(vocab.byte_id(static_cast<uint8_t>(step.cp)));
    }
  }
}

}  // namespace

TokenSequence encode(const Vocabulary& vocab, std::string_view text) {
  TokenSequence out;
  for (const Segment& seg : pre_tokenize(text, &vocab)) {
    switch (seg.kind) {
      case Segment::kUserToken:
        out.push_back(seg.user_id);
        break;
      case Segment::kRawByte:
        out.push_back(vocab.byte_id(seg.byte));
        break;
      case Segment::kDigit:
        append_piece_ids(vocab, seg.text, out);
        break;
      case Segment::kWord: {
        for (const std::string& piece :
             apply_merges(seg.text, vocab.merge_ranks()))
          append_piece_ids(vocab, piece, out);
        break;
      }
    }
  }
  return out;
}

DecodeResult decode(const Vocabulary& vocab, const TokenSequence& tokens) {
  DecodeResult result;
  std::string pending_bytes;
  auto flush_bytes = [&] {
    if (pending_bytes.empty()) return;
    for (size_t pos = 0; pos < pending_bytes.size();) {
      const util::Utf8Step step = util::utf8_next(pending_bytes, pos);
      pos += static_cast<size_t>(step.len);
      if (step.valid) {
        util::utf8_append(result.text, step.cp);
      } else {
        util::utf8_append(result.text, 0xFFFD);
        result.replaced_invalid_bytes = true;
      }
    }
    pending_bytes.clear();
  };

  for (uint32_t id : tokens) {
    if (id >= vocab.size())
      throw UsageError("token id " + std::to_string(id) +
                       " out of range for vocabulary of size " +
                       std::to_string(vocab.size()));
    const Entry& entry = vocab.entry(id);
    if (entry.category == Category::kByte) {
      pending_bytes.push_back(
          static_cast<char>(*parse_byte_surface(entry.piece)));
      continue;
    }
    flush_bytes();
    // The word-initial marker goes back to a plain space.
    const std::string& piece = entry.piece;
    for (size_t pos = 0; pos < piece.size();) {
      const util::Utf8Step step = util::utf8_next(piece, pos);
      pos += static_cast<size_t>(step.len);
      if (step.valid && step.cp == kSpaceMarker) {
        result.text += ' ';
      } else if (step.valid) {
        util::utf8_append(result.text, step.cp);
      } else {
        result.text.push_back(static_cast<char>(step.cp));
      }
    }
  }
  flush_bytes();
  return result;
}

}  // namespace curator::tokenizer
