#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace curator::util {

// One step of UTF-8 decoding. Never fails: an invalid or truncated sequence
// yields a single byte with valid=false so callers can fall back to raw bytes.
struct Utf8Step {
  char32_t cp = 0;   // decoded scalar, or the raw byte value when !valid
  int len = 0;       // bytes consumed (>= 1 whenever pos < size)
  bool valid = true;
};

Utf8Step utf8_next(std::string_view s, size_t pos);

// Number of Unicode scalar values (invalid bytes count as one each).
size_t utf8_length(std::string_view s);

// Decode to scalar values; invalid bytes decode to their byte value with the
// information that they were invalid discarded (use utf8_next to keep it).
std::vector<char32_t> utf8_decode(std::string_view s);

// Encode one scalar value.
void utf8_append(std::string& out, char32_t cp);
std::string utf8_encode(const std::vector<char32_t>& cps);

bool utf8_valid(std::string_view s);

}  // namespace curator::util
