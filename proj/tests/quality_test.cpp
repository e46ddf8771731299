#include "curator/quality.h"

#include <gtest/gtest.h>

#include <cmath>

#include "curator/errors.h"
#include "curator/util/hash.h"
#include "curator/util/text.h"
#include "curator/util/utf8.h"
#include "test_util.h"

using namespace curator;
using corpus::Language;
using corpus::PplBucket;
using quality::detect_language;
using test_util::TempDir;

namespace {

std::string repeat_cp(char32_t cp, size_t n) {
  std::string out;
  for (size_t i = 0; i < n; ++i) util::utf8_append(out, cp);
  return out;
}

corpus::CorpusManifest manifest_of(const std::vector<std::string>& texts,
                                   const std::string& prefix) {
  corpus::CorpusManifest m;
  for (size_t i = 0; i < texts.size(); ++i)
    m.documents.push_back(
        corpus::make_document(prefix + std::to_string(i), "s", texts[i]));
  return m;
}

}  // namespace

TEST(DetectLanguage, EmptyIsUnknownWithZeroConfidence) {
  const auto v = detect_language("");
  EXPECT_EQ(v.language, Language::kUnknown);
  EXPECT_EQ(v.confidence, 0.0);
}

TEST(DetectLanguage, PureCjkIsChinese) {
  std::string text;
  util::SplitMixRng rng(5);
  for (int i = 0; i < 1000; ++i)
    util::utf8_append(text, 0x4E00 + static_cast<char32_t>(rng.next_below(500)));
  const auto v = detect_language(text);
  EXPECT_EQ(v.language, Language::kZh);
  EXPECT_GT(v.zh_char_fraction, 0.99);
}

TEST(DetectLanguage, HalfLatinHalfCjkCountsExactly) {
  std::string text;
  for (int i = 0; i < 500; ++i) text += static_cast<char>('a' + i % 26);
  for (int i = 0; i < 500; ++i)
    util::utf8_append(text, 0x4E00 + static_cast<char32_t>(i));
  const auto v = detect_language(text);
  EXPECT_NEAR(v.zh_char_fraction, 0.5, 0.01);
  EXPECT_EQ(v.language, Language::kZh);  // 0.5 >= 0.3 threshold
}

TEST(DetectLanguage, EnglishNeedsLatinMajorityAndNoHan) {
  EXPECT_EQ(detect_language("plain english words only").language,
            Language::kEn);
  // 10% Han keeps a Latin-majority text out of the en bucket.
  std::string text(90, 'a');
  text += repeat_cp(0x4E2D, 10);
  EXPECT_EQ(detect_language(text).language, Language::kOther);
}

TEST(DetectLanguage, GreekIsOther) {
  const auto v = detect_language(repeat_cp(0x3B1, 50));
  EXPECT_EQ(v.language, Language::kOther);
  EXPECT_GT(v.confidence, 0.0);
}

TEST(DetectLanguage, DigitsOnlyIsUnknown) {
  const auto v = detect_language("123 456 789");
  EXPECT_EQ(v.language, Language::kUnknown);
  EXPECT_EQ(v.confidence, 0.0);
}

// Fractions are exactly the ratios a brute-force counter produces.
TEST(DetectLanguage, FractionsMatchBruteForceCounter) {
  std::string text = "mixed 中文 and english με ελληνικά";
  uint64_t letters = 0;
  uint64_t han = 0;
  uint64_t latin = 0;
  for (char32_t cp : util::utf8_decode(text)) {
    if (!util::is_letter(cp)) continue;
    ++letters;
    if (util::is_han(cp)) ++han;
    else if (util::is_latin_letter(cp)) ++latin;
  }
  const auto v = detect_language(text);
  EXPECT_DOUBLE_EQ(v.zh_char_fraction,
                   static_cast<double>(han) / static_cast<double>(letters));
  EXPECT_DOUBLE_EQ(v.latin_char_fraction,
                   static_cast<double>(latin) / static_cast<double>(letters));
}

TEST(Classifier, SymmetricClassesScoreNearHalf) {
  const auto docs = manifest_of({"identical document text"}, "d");
  quality::ClassifierConfig cfg;
  cfg.feature_dim = 1 << 12;
  cfg.epochs = 10;
  const auto clf = quality::train_quality_classifier(docs, docs, cfg);
  EXPECT_NEAR(clf.score("identical document text"), 0.5, 0.05);
}

TEST(Classifier, SeparableSetReachesHighHeldOutAccuracy) {
  // Positives carry a marker trigram, negatives never do.
  std::vector<std::string> pos;
  std::vector<std::string> neg;
  util::SplitMixRng rng(17);
  auto noise = [&rng] {
    std::string s;
    for (int i = 0; i < 40; ++i)
      s += static_cast<char>('a' + rng.next_below(26));
    return s;
  };
  for (int i = 0; i < 60; ++i) {
    pos.push_back(noise() + "qzj" + noise());
    neg.push_back(noise());
  }
  quality::ClassifierConfig cfg;
  cfg.feature_dim = 1 << 14;
  cfg.epochs = 20;
  const auto clf = quality::train_quality_classifier(
      manifest_of(pos, "p"), manifest_of(neg, "n"), cfg);

  int correct = 0;
  int total = 0;
  for (int i = 0; i < 50; ++i) {
    correct += clf.score(noise() + "qzj" + noise()) > 0.5 ? 1 : 0;
    correct += clf.score(noise()) < 0.5 ? 1 : 0;
    total += 2;
  }
  EXPECT_GE(static_cast<double>(correct) / total, 0.95);
  // Training loss decreases on a separable set.
  ASSERT_GE(clf.epoch_losses.size(), 2u);
  EXPECT_LT(clf.epoch_losses.back(), clf.epoch_losses.front());
}

TEST(Classifier, EmptyClassIsATrainingError) {
  const auto docs = manifest_of({"text"}, "d");
  EXPECT_THROW(
      quality::train_quality_classifier({}, docs, quality::ClassifierConfig{}),
      UsageError);
  EXPECT_THROW(
      quality::train_quality_classifier(docs, {}, quality::ClassifierConfig{}),
      UsageError);
}

// Length-normalized wrap-around features make self-concatenation exact.
TEST(Classifier, ScoreInvariantUnderSelfConcatenation) {
  const auto pos = manifest_of({"alpha beta gamma", "delta epsilon"}, "p");
  const auto neg = manifest_of({"one two three", "four five"}, "n");
  quality::ClassifierConfig cfg;
  cfg.feature_dim = 1 << 12;
  const auto clf = quality::train_quality_classifier(pos, neg, cfg);
  for (const std::string text :
       {std::string("the quick brown fox"), std::string("中文测试文本"),
        std::string("abc")}) {
    EXPECT_DOUBLE_EQ(clf.score(text), clf.score(text + text)) << text;
  }
}

TEST(Classifier, DeterministicGivenSeed) {
  const auto pos = manifest_of({"aaa bbb", "ccc ddd", "eee"}, "p");
  const auto neg = manifest_of({"xxx yyy", "zzz www", "vvv"}, "n");
  quality::ClassifierConfig cfg;
  cfg.feature_dim = 1 << 10;
  const auto a = quality::train_quality_classifier(pos, neg, cfg);
  const auto b = quality::train_quality_classifier(pos, neg, cfg);
  EXPECT_EQ(a.weights, b.weights);
  EXPECT_EQ(a.bias, b.bias);
}

TEST(Classifier, PersistenceRoundtrip) {
  TempDir tmp("classifier");
  const auto pos = manifest_of({"aaa bbb ccc"}, "p");
  const auto neg = manifest_of({"xxx yyy zzz"}, "n");
  quality::ClassifierConfig cfg;
  cfg.feature_dim = 1 << 10;
  const auto clf = quality::train_quality_classifier(pos, neg, cfg);
  quality::save_classifier(clf, tmp.path("model.bin"));
  const auto back = quality::load_classifier(tmp.path("model.bin"));
  EXPECT_EQ(back.feature_dim, clf.feature_dim);
  EXPECT_EQ(back.weights, clf.weights);
  EXPECT_DOUBLE_EQ(back.bias, clf.bias);
  EXPECT_DOUBLE_EQ(back.score("some text"), clf.score("some text"));
}

TEST(PplBucket, MinimumOfCalibrationIsHead) {
  EXPECT_EQ(quality::assign_ppl_bucket(10.0, {10.0, 20.0, 30.0}),
            PplBucket::kHead);
}

TEST(PplBucket, UniformGridMidpointIsMiddle) {
  std::vector<double> grid;
  for (int i = 1; i <= 300; ++i) grid.push_back(i);
  EXPECT_EQ(quality::assign_ppl_bucket(150.0, grid), PplBucket::kMiddle);
  // Nearest-rank boundaries: value 100 closes the head, 200 the middle.
  EXPECT_EQ(quality::assign_ppl_bucket(100.0, grid), PplBucket::kHead);
  EXPECT_EQ(quality::assign_ppl_bucket(100.5, grid), PplBucket::kMiddle);
  EXPECT_EQ(quality::assign_ppl_bucket(200.5, grid), PplBucket::kTail);
}

TEST(PplBucket, NonPositivePerplexityIsDomainError) {
  EXPECT_THROW(quality::assign_ppl_bucket(0.0, {1.0}), UsageError);
  EXPECT_THROW(quality::assign_ppl_bucket(-3.0, {1.0}), UsageError);
}

TEST(PplBucket, EmptyCalibrationRejected) {
  EXPECT_THROW(quality::assign_ppl_bucket(1.0, {}), UsageError);
}

// Distinct populations split into thirds whose sizes differ by at most 1.
TEST(PplBucket, PartitionSizesDifferByAtMostOne) {
  util::SplitMixRng rng(3);
  for (size_t n : {3u, 4u, 5u, 6u, 7u, 10u, 31u, 100u}) {
    std::vector<double> calibration;
    double v = 1.0;
    for (size_t i = 0; i < n; ++i) {
      v += 1.0 + rng.next_unit();
      calibration.push_back(v);
    }
    size_t counts[3] = {0, 0, 0};
    for (double p : calibration) {
      const auto bucket = quality::assign_ppl_bucket(p, calibration);
      counts[bucket == PplBucket::kHead ? 0
             : bucket == PplBucket::kMiddle ? 1 : 2] += 1;
    }
    const size_t lo = std::min({counts[0], counts[1], counts[2]});
    const size_t hi = std::max({counts[0], counts[1], counts[2]});
    EXPECT_LE(hi - lo, 1u) << "n=" << n;
  }
}

TEST(CodeFilter, EmptyFileDrops) {
  const auto d = quality::filter_code_file("a.py", "", {}, 0);
  EXPECT_FALSE(d.keep);
  ASSERT_EQ(d.reasons.size(), 1u);
  EXPECT_EQ(d.reasons[0], corpus::DropReason::kEmpty);
}

TEST(CodeFilter, TypicalSourceFileKept) {
  std::string text;
  for (int i = 0; i < 100; ++i)
    text += "const value" + std::to_string(i) + " = compute(input);\n";
  const auto d = quality::filter_code_file("a.cc", text, {}, 0);
  EXPECT_TRUE(d.keep) << "reasons: " << d.reasons.size();
}

TEST(CodeFilter, MinifiedSingleLineDropsLongLine) {
  const std::string minified(5000, 'x');
  const auto d = quality::filter_code_file("bundle.js", minified, {}, 0);
  EXPECT_FALSE(d.keep);
  EXPECT_NE(std::find(d.reasons.begin(), d.reasons.end(),
                      corpus::DropReason::kLongLine),
            d.reasons.end());
}

TEST(CodeFilter, HighMeanLineLengthDrops) {
  std::string text;
  for (int i = 0; i < 10; ++i) text += std::string(500, 'y') + "\n";
  const auto d = quality::filter_code_file("gen.cc", text, {}, 0);
  EXPECT_FALSE(d.keep);
  EXPECT_NE(std::find(d.reasons.begin(), d.reasons.end(),
                      corpus::DropReason::kMeanLine),
            d.reasons.end());
}

TEST(CodeFilter, LowAlnumFractionDrops) {
  std::string text;
  for (int i = 0; i < 50; ++i) text += "+-*/ ===== ()[]{} <<>>\n";
  const auto d = quality::filter_code_file("ops.cc", text, {}, 0);
  EXPECT_FALSE(d.keep);
  EXPECT_NE(std::find(d.reasons.begin(), d.reasons.end(),
                      corpus::DropReason::kLowAlnum),
            d.reasons.end());
}

// Markup sampling is a pure function of (seed, path), not a per-run draw.
TEST(CodeFilter, MarkupSamplingDeterministic) {
  quality::CodeFilterPolicy policy;
  policy.markup_keep_fraction = 0.5;
  const std::string text = "key: value\nother: thing\n";
  int kept = 0;
  for (int i = 0; i < 200; ++i) {
    const std::string path = "data/file" + std::to_string(i) + ".yaml";
    const auto first = quality::filter_code_file(path, text, policy, 42);
    const auto second = quality::filter_code_file(path, text, policy, 42);
    EXPECT_EQ(first.keep, second.keep) << path;
    kept += first.keep ? 1 : 0;
  }
  // Roughly half survive at keep fraction 0.5.
  EXPECT_GT(kept, 60);
  EXPECT_LT(kept, 140);
  // A different seed flips some decisions.
  int agree = 0;
  for (int i = 0; i < 200; ++i) {
    const std::string path = "data/file" + std::to_string(i) + ".yaml";
    agree += quality::filter_code_file(path, text, policy, 42).keep ==
                     quality::filter_code_file(path, text, policy, 43).keep
                 ? 1
                 : 0;
  }
  EXPECT_LT(agree, 200);
}

TEST(CodeFilter, NonMarkupExtensionNotSampled) {
  quality::CodeFilterPolicy policy;
  policy.markup_keep_fraction = 0.0;  // would drop every markup file
  const auto d =
      quality::filter_code_file("main.rs", "fn main() {}\n", policy, 0);
  EXPECT_TRUE(d.keep);
}
