#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace curator::extract {

enum class TagClass { kParagraph, kHeading, kListItem, kNav, kFooter, kOther };

const char* to_string(TagClass v);

// One visible text run, whitespace-normalized, classified by element
// ancestry.
struct Block {
  std::string text;
  TagClass tag_class = TagClass::kOther;
  double link_char_fraction = 0.0;
  uint64_t char_len = 0;
};

struct ExtractionPolicy {
  double max_link_fraction = 0.5;
  uint64_t min_block_chars = 20;  // Unicode scalars
};

// Tolerant tag scanner: no DOM, no scripts, never fails. Plain text without
// markup comes back as "other" blocks split on blank lines.
std::vector<Block> segment_page(std::string_view raw_html);

// Keeps blocks that pass the class/link/length policy; headings are
// additionally kept only when a kept body block follows them. Output is the
// kept blocks joined by blank lines.
std::string extract_main_text(const std::vector<Block>& blocks,
                              const ExtractionPolicy& policy);

}  // namespace curator::extract
