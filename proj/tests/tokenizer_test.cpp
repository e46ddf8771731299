#include "curator/tokenizer.h"

#include <gtest/gtest.h>

#include <set>

#include "curator/errors.h"
#include "curator/util/hash.h"
#include "curator/util/utf8.h"
#include "test_util.h"

using namespace curator;
using test_util::TempDir;
using tokenizer::Vocabulary;

namespace {

corpus::CorpusManifest corpus_of(const std::vector<std::string>& texts) {
  corpus::CorpusManifest m;
  for (size_t i = 0; i < texts.size(); ++i)
    m.documents.push_back(
        corpus::make_document("d" + std::to_string(i), "s", texts[i]));
  return m;
}

// Small but real vocabulary: trained base + user extensions.
Vocabulary make_test_vocab() {
  const auto trained = tokenizer::train_bpe(
      corpus_of({"the quick brown fox jumps over the lazy dog",
                 "the rain in spain stays mainly in the plain",
                 "pack my box with five dozen liquor jugs",
                 "how vexingly quick daft zebras jump"}),
      330);
  return Vocabulary::assemble(trained.entries, trained.merges,
                              {"中", "文", "试"}, {"中文", "中文测试"},
                              {"<pad>", "<eos>"});
}

std::string random_unicode(uint64_t seed, size_t max_len) {
  util::SplitMixRng rng(seed);
  std::string text;
  const size_t len = rng.next_below(max_len + 1);
  for (size_t i = 0; i < len; ++i) {
    switch (rng.next_below(8)) {
      case 0: text += static_cast<char>('a' + rng.next_below(26)); break;
      case 1: text += ' '; break;
      case 2: text += static_cast<char>('0' + rng.next_below(10)); break;
      case 3: text += '\n'; break;
      case 4:
        util::utf8_append(text, 0x4E00 + static_cast<char32_t>(rng.next_below(2000)));
        break;
      case 5:
        util::utf8_append(text, 0x3B1 + static_cast<char32_t>(rng.next_below(20)));
        break;
      case 6:
        util::utf8_append(text, 0x1F600 + static_cast<char32_t>(rng.next_below(60)));
        break;
      default:
        // The space-marker character itself and other tricky scalars.
        util::utf8_append(text, rng.next_below(2) ? char32_t{0x2581}
                                                  : char32_t{0x200D});
        break;
    }
  }
  return text;
}

}  // namespace

TEST(TrainBpe, SingleSymbolCorpusMergesByFrequency) {
  const auto trained =
      tokenizer::train_bpe(corpus_of({std::string(64, 'a')}), 260);
  // Entries: 256 bytes + "a" + merge products.
  ASSERT_EQ(trained.entries.size(), 260u);
  EXPECT_EQ(trained.entries[256], "a");
  EXPECT_EQ(trained.entries[257], "aa");
  EXPECT_EQ(trained.entries[258], "aaaa");
  EXPECT_EQ(trained.entries[259], "aaaaaaaa");
  ASSERT_GE(trained.merges.size(), 3u);
  EXPECT_EQ(trained.merges[0].left, "a");
  EXPECT_EQ(trained.merges[0].right, "a");
  EXPECT_EQ(trained.merges[1].left, "aa");
  EXPECT_EQ(trained.merges[1].right, "aa");
}

TEST(TrainBpe, EmptyCorpusRejected) {
  EXPECT_THROW(tokenizer::train_bpe({}, 300), UsageError);
}

TEST(TrainBpe, TargetSizeBelowAlphabetRejected) {
  EXPECT_THROW(tokenizer::train_bpe(corpus_of({"abc"}), 256), UsageError);
}

TEST(TrainBpe, TiesBreakLexicographically) {
  // "xy" and "pq" both occur twice with no overlap; "pq" merges first.
  const auto trained =
      tokenizer::train_bpe(corpus_of({"xy", "pq", "xy", "pq"}), 261);
  ASSERT_FALSE(trained.merges.empty());
  EXPECT_EQ(trained.merges[0].left, "p");
  EXPECT_EQ(trained.merges[0].right, "q");
  // Deterministic across runs.
  const auto again =
      tokenizer::train_bpe(corpus_of({"xy", "pq", "xy", "pq"}), 261);
  ASSERT_EQ(trained.merges.size(), again.merges.size());
  for (size_t i = 0; i < trained.merges.size(); ++i) {
    EXPECT_EQ(trained.merges[i].left, again.merges[i].left);
    EXPECT_EQ(trained.merges[i].right, again.merges[i].right);
  }
}

TEST(Assemble, ComponentSizesAdd) {
  std::vector<std::string> base;
  for (int b = 0; b < 256; ++b) {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "<0x%02X>", b);
    base.push_back(buf);
  }
  base.push_back("ab");
  base.push_back("cd");
  const auto vocab = Vocabulary::assemble(base, {}, {"中", "文"},
                                          {"中文", "文中", "中中"},
                                          {"<pad>", "<eos>"});
  EXPECT_EQ(vocab.size(), 258u + 2u + 3u + 2u);
}

TEST(Assemble, CrossComponentDuplicateNamesToken) {
  std::vector<std::string> base;
  for (int b = 0; b < 256; ++b) {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "<0x%02X>", b);
    base.push_back(buf);
  }
  base.push_back("中");
  try {
    Vocabulary::assemble(base, {}, {"中"}, {}, {});
    FAIL() << "expected IntegrityError";
  } catch (const IntegrityError& e) {
    EXPECT_NE(std::string(e.what()).find("中"), std::string::npos);
  }
}

TEST(Assemble, MissingByteTokenRejected) {
  std::vector<std::string> base{"just", "words"};
  EXPECT_THROW(Vocabulary::assemble(base, {}, {}, {}, {}), IntegrityError);
}

TEST(Assemble, MultiDigitUserTokenRejected) {
  std::vector<std::string> base;
  for (int b = 0; b < 256; ++b) {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "<0x%02X>", b);
    base.push_back(buf);
  }
  EXPECT_THROW(Vocabulary::assemble(base, {}, {}, {}, {"v2024"}),
               IntegrityError);
}

TEST(Encode, EmptyText) {
  const auto vocab = make_test_vocab();
  EXPECT_TRUE(tokenizer::encode(vocab, "").empty());
}

TEST(Encode, DigitsSplitIndividually) {
  const auto vocab = make_test_vocab();
  const auto ids = tokenizer::encode(vocab, "2023");
  EXPECT_EQ(ids.size(), 4u);
  for (uint32_t id : ids) {
    const auto& piece = vocab.entry(id).piece;
    int digits = 0;
    for (char c : piece) digits += (c >= '0' && c <= '9') ? 1 : 0;
    EXPECT_LE(digits, 1) << piece;
  }
  const auto round = tokenizer::decode(vocab, ids);
  EXPECT_EQ(round.text, "2023");
}

TEST(Encode, ZhWordMatchesAsSingleToken) {
  const auto vocab = make_test_vocab();
  const auto ids = tokenizer::encode(vocab, "中文");
  ASSERT_EQ(ids.size(), 1u);
  EXPECT_EQ(vocab.entry(ids[0]).piece, "中文");
  // Longest match wins over the shorter zh_word and the zh_chars.
  const auto longer = tokenizer::encode(vocab, "中文测试");
  ASSERT_EQ(longer.size(), 1u);
  EXPECT_EQ(vocab.entry(longer[0]).piece, "中文测试");
}

TEST(Encode, UnknownCharacterFallsBackToBytes) {
  const auto vocab = make_test_vocab();
  const std::string rare = "\xF0\x9F\xA6\x96";  // dinosaur emoji, unseen
  const auto ids = tokenizer::encode(vocab, rare);
  EXPECT_EQ(ids.size(), 4u);
  for (uint32_t id : ids)
    EXPECT_EQ(vocab.entry(id).category, tokenizer::Category::kByte);
  EXPECT_EQ(tokenizer::decode(vocab, ids).text, rare);
}

TEST(Decode, EmptyIsEmpty) {
  const auto vocab = make_test_vocab();
  EXPECT_EQ(tokenizer::decode(vocab, {}).text, "");
}

TEST(Decode, OutOfRangeIdRejected) {
  const auto vocab = make_test_vocab();
  EXPECT_THROW(tokenizer::decode(vocab, {vocab.size()}), UsageError);
}

TEST(Decode, InvalidByteRunUsesReplacementPolicy) {
  const auto vocab = make_test_vocab();
  const tokenizer::TokenSequence ids{vocab.byte_id(0xFF)};
  const auto result = tokenizer::decode(vocab, ids);
  EXPECT_TRUE(result.replaced_invalid_bytes);
  EXPECT_EQ(result.text, "\xEF\xBF\xBD");  // U+FFFD
}

// decode(encode(s)) == s for arbitrary valid UTF-8, spaces and digits and
// the marker character included.
TEST(Roundtrip, RandomUnicodeIsExact) {
  const auto vocab = make_test_vocab();
  for (uint64_t seed = 0; seed < 2000; ++seed) {
    const std::string text = random_unicode(seed, 120);
    const auto result = tokenizer::decode(vocab, tokenizer::encode(vocab, text));
    ASSERT_EQ(result.text, text) << "seed " << seed;
    ASSERT_FALSE(result.replaced_invalid_bytes) << "seed " << seed;
  }
}

TEST(Roundtrip, SpacesExactlyPreserved) {
  const auto vocab = make_test_vocab();
  for (const std::string text :
       {std::string(" leading"), std::string("trailing "),
        std::string("a  double  space"), std::string("   "),
        std::string("the quick brown fox")}) {
    EXPECT_EQ(tokenizer::decode(vocab, tokenizer::encode(vocab, text)).text,
              text);
  }
}

TEST(Roundtrip, LiteralSpaceMarkerCharacter) {
  const auto vocab = make_test_vocab();
  const std::string text = "a\xE2\x96\x81z";  // literal U+2581 in input
  EXPECT_EQ(tokenizer::decode(vocab, tokenizer::encode(vocab, text)).text,
            text);
}

// No emitted token's string contains two ASCII digits, ever.
TEST(Roundtrip, DigitAtomicityAcrossFuzz) {
  const auto vocab = make_test_vocab();
  for (uint64_t seed = 5000; seed < 5500; ++seed) {
    const std::string text = random_unicode(seed, 60);
    for (uint32_t id : tokenizer::encode(vocab, text)) {
      const auto& piece = vocab.entry(id).piece;
      int digits = 0;
      for (char c : piece) digits += (c >= '0' && c <= '9') ? 1 : 0;
      ASSERT_LE(digits, 1) << "token '" << piece << "' seed " << seed;
    }
  }
}

TEST(VocabFile, SaveLoadRoundtrip) {
  TempDir tmp("vocab");
  const auto vocab = make_test_vocab();
  vocab.save(tmp.path("vocab.txt"));
  const auto back = Vocabulary::load(tmp.path("vocab.txt"));
  ASSERT_EQ(back.size(), vocab.size());
  for (uint32_t id = 0; id < vocab.size(); ++id) {
    EXPECT_EQ(back.entry(id).piece, vocab.entry(id).piece) << id;
    EXPECT_EQ(back.entry(id).category, vocab.entry(id).category) << id;
  }
  ASSERT_EQ(back.merges().size(), vocab.merges().size());
  // Identical encodings through the reloaded vocabulary.
  for (uint64_t seed = 9000; seed < 9050; ++seed) {
    const std::string text = random_unicode(seed, 80);
    EXPECT_EQ(tokenizer::encode(back, text), tokenizer::encode(vocab, text));
  }
}

TEST(VocabFile, EscapesControlCharacters) {
  TempDir tmp("vocab_esc");
  std::vector<std::string> base;
  for (int b = 0; b < 256; ++b) {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "<0x%02X>", b);
    base.push_back(buf);
  }
  base.push_back("\n");
  base.push_back("\t");
  base.push_back("a\\b");
  const auto vocab = Vocabulary::assemble(base, {}, {}, {}, {});
  vocab.save(tmp.path("vocab.txt"));
  const auto back = Vocabulary::load(tmp.path("vocab.txt"));
  ASSERT_EQ(back.size(), vocab.size());
  EXPECT_EQ(back.entry(256).piece, "\n");
  EXPECT_EQ(back.entry(257).piece, "\t");
  EXPECT_EQ(back.entry(258).piece, "a\\b");
}

TEST(ByteOnly, EncodesToRawBytes) {
  const auto vocab = Vocabulary::byte_only();
  EXPECT_EQ(vocab.size(), 256u);
  const std::string text = "hi 中";
  const auto ids = tokenizer::encode(vocab, text);
  ASSERT_EQ(ids.size(), text.size());
  EXPECT_EQ(tokenizer::decode(vocab, ids).text, text);
}
