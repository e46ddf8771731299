#include "curator/util/text.h"

#include "curator/util/utf8.h"

namespace curator::util {

bool is_han(char32_t cp) {
  return (cp >= 0x4E00 && cp <= 0x9FFF) ||    // unified ideographs
         (cp >= 0x3400 && cp <= 0x4DBF) ||    // extension A
         (cp >= 0xF900 && cp <= 0xFAFF) ||    // compatibility ideographs
         (cp >= 0x20000 && cp <= 0x2A6DF);    // extension B
}

bool is_latin_letter(char32_t cp) {
  if ((cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z')) return true;
  if (cp >= 0xC0 && cp <= 0x24F) return cp != 0xD7 && cp != 0xF7;
  return false;
}

bool is_letter(char32_t cp) {
  if (is_latin_letter(cp) || is_han(cp)) return true;
  return (cp >= 0x370 && cp <= 0x3FF) ||     // Greek
         (cp >= 0x400 && cp <= 0x4FF) ||     // Cyrillic
         (cp >= 0x590 && cp <= 0x5FF) ||     // Hebrew
         (cp >= 0x600 && cp <= 0x6FF) ||     // Arabic
         (cp >= 0x900 && cp <= 0x97F) ||     // Devanagari
         (cp >= 0xE00 && cp <= 0xE7F) ||     // Thai
         (cp >= 0x3040 && cp <= 0x30FF) ||   // Hiragana + Katakana
         (cp >= 0xAC00 && cp <= 0xD7AF);     // Hangul syllables
}

namespace {

bool is_hspace(char32_t cp) {
  return cp == ' ' || cp == '\t' || cp == '\r' || cp == 0xA0;
}

}  // namespace

std::string normalize_text(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  int pending_newlines = 0;
  bool pending_space = false;
  bool at_start = true;
  for (size_t pos = 0; pos < s.size();) {
    const Utf8Step step = utf8_next(s, pos);
    pos += static_cast<size_t>(step.len);
    const char32_t cp = step.cp;
    if (cp == '\n') {
      ++pending_newlines;
      continue;
    }
    if (step.valid && is_hspace(cp)) {
      pending_space = true;
      continue;
    }
    if (!at_start) {
      if (pending_newlines >= 2) {
        out += "\n\n";
      } else if (pending_newlines == 1 || pending_space) {
        out += ' ';
      }
    }
    pending_newlines = 0;
    pending_space = false;
    at_start = false;
    if (step.valid) {
      utf8_append(out, cp);
    } else {
      out.push_back(static_cast<char>(cp));
    }
  }
  return out;
}

std::string collapse_whitespace(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending = false;
  bool at_start = true;
  for (size_t pos = 0; pos < s.size();) {
    const Utf8Step step = utf8_next(s, pos);
    pos += static_cast<size_t>(step.len);
    const char32_t cp = step.cp;
    if (cp == '\n' || (step.valid && is_hspace(cp))) {
      pending = true;
      continue;
    }
    if (pending && !at_start) out += ' ';
    pending = false;
    at_start = false;
    if (step.valid) {
      utf8_append(out, cp);
    } else {
      out.push_back(static_cast<char>(cp));
    }
  }
  return out;
}

std::vector<std::string> split_paragraphs(std::string_view s) {
  std::vector<std::string> paras;
  size_t start = 0;
  auto flush = [&](size_t end) {
    std::string_view piece = s.substr(start, end - start);
    // Trim stray newlines/space around the paragraph.
    while (!piece.empty() && (piece.front() == '\n' || piece.front() == ' '))
      piece.remove_prefix(1);
    while (!piece.empty() && (piece.back() == '\n' || piece.back() == ' '))
      piece.remove_suffix(1);
    if (!piece.empty()) paras.emplace_back(piece);
  };
  // Blank-line split; normalized text never holds runs longer than two.
  size_t pos = 0;
  while (pos + 1 < s.size()) {
    if (s[pos] == '\n' && s[pos + 1] == '\n') {
      flush(pos);
      start = pos + 2;
      pos += 2;
      continue;
    }
    ++pos;
  }
  flush(s.size());
  return paras;
}

std::string to_lower_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return out;
}

}  // namespace curator::util
