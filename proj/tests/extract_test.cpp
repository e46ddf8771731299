#include "curator/extract.h"

#include <gtest/gtest.h>

#include <fstream>

#include <json.hpp>

#include "test_util.h"

using namespace curator;
using extract::Block;
using extract::ExtractionPolicy;
using extract::TagClass;

namespace {

std::vector<std::pair<std::string, std::string>> load_golden_blocks() {
  std::ifstream in(test_util::data_path("golden_page.blocks.jsonl"));
  std::vector<std::pair<std::string, std::string>> blocks;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line);
    blocks.emplace_back(j.at("tag_class").get<std::string>(),
                        j.at("text").get<std::string>());
  }
  return blocks;
}

}  // namespace

TEST(Extract, EmptyInputGivesNoBlocks) {
  EXPECT_TRUE(extract::segment_page("").empty());
}

TEST(Extract, PlainParagraphIsOneOtherBlock) {
  const std::string text =
      "A markup-free paragraph of plain text with no structure at all.";
  const auto blocks = extract::segment_page(text);
  ASSERT_EQ(blocks.size(), 1u);
  EXPECT_EQ(blocks[0].tag_class, TagClass::kOther);
  EXPECT_EQ(blocks[0].text, text);
  EXPECT_EQ(blocks[0].link_char_fraction, 0.0);
  EXPECT_EQ(blocks[0].char_len, text.size());
}

TEST(Extract, PlainTextSplitsOnBlankLines) {
  const auto blocks = extract::segment_page("first paragraph\n\nsecond one");
  ASSERT_EQ(blocks.size(), 2u);
  EXPECT_EQ(blocks[0].text, "first paragraph");
  EXPECT_EQ(blocks[1].text, "second one");
}

// The hand-labeled fixture defines correctness for this module.
TEST(Extract, GoldenFixtureBlocks) {
  const auto blocks =
      extract::segment_page(test_util::slurp(test_util::data_path(
          "golden_page.html")));
  const auto golden = load_golden_blocks();
  ASSERT_EQ(blocks.size(), golden.size());
  for (size_t i = 0; i < blocks.size(); ++i) {
    EXPECT_EQ(extract::to_string(blocks[i].tag_class), golden[i].first)
        << "block " << i;
    EXPECT_EQ(blocks[i].text, golden[i].second) << "block " << i;
  }
  // Navigation is pure links; body paragraphs are not.
  EXPECT_DOUBLE_EQ(blocks[1].link_char_fraction, 1.0);
  EXPECT_DOUBLE_EQ(blocks[2].link_char_fraction, 1.0);
  EXPECT_DOUBLE_EQ(blocks[4].link_char_fraction, 0.0);
  EXPECT_GT(blocks[5].link_char_fraction, 0.1);
  EXPECT_LT(blocks[5].link_char_fraction, 0.3);
}

TEST(Extract, GoldenFixtureBody) {
  const auto blocks =
      extract::segment_page(test_util::slurp(test_util::data_path(
          "golden_page.html")));
  const std::string body = extract::extract_main_text(blocks, {});
  std::string expected =
      test_util::slurp(test_util::data_path("golden_page.body.txt"));
  if (!expected.empty() && expected.back() == '\n') expected.pop_back();
  EXPECT_EQ(body, expected);
}

TEST(Extract, AllNavGivesEmptyBody) {
  std::vector<Block> blocks;
  Block b;
  b.text = "a navigation bar with plenty of characters in it";
  b.char_len = b.text.size();
  b.tag_class = TagClass::kNav;
  blocks.push_back(b);
  b.tag_class = TagClass::kFooter;
  blocks.push_back(b);
  EXPECT_EQ(extract::extract_main_text(blocks, {}), "");
}

TEST(Extract, LongCleanParagraphKeptVerbatim) {
  Block b;
  b.text = std::string(500, 'x');
  b.char_len = 500;
  b.tag_class = TagClass::kParagraph;
  EXPECT_EQ(extract::extract_main_text({b}, {}), b.text);
}

TEST(Extract, LinkHeavyBlockDropped) {
  Block b;
  b.text = std::string(100, 'x');
  b.char_len = 100;
  b.tag_class = TagClass::kParagraph;
  b.link_char_fraction = 0.9;
  EXPECT_EQ(extract::extract_main_text({b}, {}), "");
}

TEST(Extract, HeadingWithoutFollowingBodyIsDropped) {
  Block heading;
  heading.text = "a headline long enough to pass the length policy";
  heading.char_len = heading.text.size();
  heading.tag_class = TagClass::kHeading;
  EXPECT_EQ(extract::extract_main_text({heading}, {}), "");

  Block body;
  body.text = std::string(60, 'y');
  body.char_len = 60;
  body.tag_class = TagClass::kParagraph;
  EXPECT_EQ(extract::extract_main_text({heading, body}, {}),
            heading.text + "\n\n" + body.text);
}

TEST(Extract, OutputIsBlockwiseSubsequence) {
  const auto blocks =
      extract::segment_page(test_util::slurp(test_util::data_path(
          "golden_page.html")));
  const std::string body = extract::extract_main_text(blocks, {});
  // Every output paragraph is some block's text, in order.
  size_t cursor = 0;
  size_t start = 0;
  auto next_para = [&](std::string& out) {
    if (start >= body.size()) return false;
    const size_t brk = body.find("\n\n", start);
    out = body.substr(start, brk == std::string::npos ? std::string::npos
                                                      : brk - start);
    start = brk == std::string::npos ? body.size() : brk + 2;
    return true;
  };
  std::string para;
  while (next_para(para)) {
    bool found = false;
    for (; cursor < blocks.size(); ++cursor) {
      if (blocks[cursor].text == para) {
        found = true;
        ++cursor;
        break;
      }
    }
    EXPECT_TRUE(found) << "paragraph not a block: " << para;
  }
}

// Extracting already-extracted text returns it unchanged.
TEST(Extract, IdempotentOnExtractedText) {
  const auto blocks =
      extract::segment_page(test_util::slurp(test_util::data_path(
          "golden_page.html")));
  const std::string body = extract::extract_main_text(blocks, {});
  const std::string again =
      extract::extract_main_text(extract::segment_page(body), {});
  EXPECT_EQ(again, body);
}

TEST(Extract, RaisingMinBlockCharsNeverGrowsOutput) {
  const auto blocks =
      extract::segment_page(test_util::slurp(test_util::data_path(
          "golden_page.html")));
  ExtractionPolicy policy;
  size_t last = std::string::npos;
  for (uint64_t min_chars : {0, 10, 20, 50, 100, 200, 1000}) {
    policy.min_block_chars = min_chars;
    const size_t len = extract::extract_main_text(blocks, policy).size();
    if (last != std::string::npos) EXPECT_LE(len, last);
    last = len;
  }
}

TEST(Extract, MalformedMarkupDegradesGracefully) {
  const auto blocks = extract::segment_page(
      "<p>unclosed paragraph with <b>styling and a stray < sign plus "
      "enough length to keep");
  ASSERT_FALSE(blocks.empty());
  std::string all;
  for (const auto& b : blocks) all += b.text;
  EXPECT_NE(all.find("unclosed paragraph"), std::string::npos);
  EXPECT_NE(all.find("< sign"), std::string::npos);
}

TEST(Extract, EntityDecoding) {
  const auto blocks = extract::segment_page(
      "<p>fish &amp; chips &lt;tested&gt; at caf&#233; &#x2603; time</p>");
  ASSERT_EQ(blocks.size(), 1u);
  EXPECT_EQ(blocks[0].text, "fish & chips <tested> at café ☃ time");
}
