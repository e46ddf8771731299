#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace curator::util {

// --- character classes -------------------------------------------------

// Han ideographs (the ranges that matter for web text).
bool is_han(char32_t cp);
// Latin letters: ASCII plus Latin-1 supplement and Extended-A/B.
bool is_latin_letter(char32_t cp);
// Any letter across the scripts we care to distinguish (Han, Latin, Greek,
// Cyrillic, Arabic, Hebrew, Devanagari, Kana, Hangul, Thai).
bool is_letter(char32_t cp);

inline bool is_ascii_digit(char32_t cp) { return cp >= '0' && cp <= '9'; }

// Alphanumeric for code-quality heuristics: ASCII alnum or any letter.
inline bool is_alnum(char32_t cp) {
  return is_ascii_digit(cp) || (cp >= 'a' && cp <= 'z') ||
         (cp >= 'A' && cp <= 'Z') || is_letter(cp);
}

// --- whitespace normalization -------------------------------------------

// Collapse runs of horizontal whitespace to a single space, fold single
// newlines into spaces, reduce blank-line runs to one blank line, trim.
// This is the canonical form used for manifests produced by extraction.
std::string normalize_text(std::string_view s);

// Collapse every whitespace run (including newlines) to one space and trim.
// Canonical form for shingling and recurrence hashing.
std::string collapse_whitespace(std::string_view s);

// Split on blank lines (after normalize_text-style folding callers already
// applied); returns the non-empty paragraphs in order.
std::vector<std::string> split_paragraphs(std::string_view s);

std::string to_lower_ascii(std::string_view s);

}  // namespace curator::util
