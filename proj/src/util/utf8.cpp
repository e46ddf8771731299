#include "curator/util/utf8.h"

namespace curator::util {

Utf8Step utf8_next(std::string_view s, size_t pos) {
  Utf8Step step;
  if (pos >= s.size()) return step;
  const auto b0 = static_cast<unsigned char>(s[pos]);
  if (b0 < 0x80) {
    step.cp = b0;
    step.len = 1;
    return step;
  }

  int want = 0;
  char32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    want = 1;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    want = 2;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    want = 3;
    cp = b0 & 0x07;
  } else {
    step.cp = b0;
    step.len = 1;
    step.valid = false;
    return step;
  }

  if (pos + static_cast<size_t>(want) >= s.size()) {
    // Truncated sequence at end of input.
    step.cp = b0;
    step.len = 1;
    step.valid = false;
    return step;
  }
  for (int i = 1; i <= want; ++i) {
    const auto b = static_cast<unsigned char>(s[pos + i]);
    if ((b & 0xC0) != 0x80) {
      step.cp = b0;
      step.len = 1;
      step.valid = false;
      return step;
    }
    cp = (cp << 6) | (b & 0x3F);
  }

  // Reject overlongs, surrogates and out-of-range values.
  const bool overlong = (want == 1 && cp < 0x80) || (want == 2 && cp < 0x800) ||
                        (want == 3 && cp < 0x10000);
  if (overlong || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
    step.cp = b0;
    step.len = 1;
    step.valid = false;
    return step;
  }
  step.cp = cp;
  step.len = want + 1;
  return step;
}

size_t utf8_length(std::string_view s) {
  size_t n = 0;
  for (size_t pos = 0; pos < s.size();) {
    pos += static_cast<size_t>(utf8_next(s, pos).len);
    ++n;
  }
  return n;
}

std::vector<char32_t> utf8_decode(std::string_view s) {
  std::vector<char32_t> out;
  out.reserve(s.size());
  for (size_t pos = 0; pos < s.size();) {
    const Utf8Step step = utf8_next(s, pos);
    out.push_back(step.cp);
    pos += static_cast<size_t>(step.len);
  }
  return out;
}

void utf8_append(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

std::string utf8_encode(const std::vector<char32_t>& cps) {
  std::string out;
  out.reserve(cps.size() * 3);
  for (char32_t cp : cps) utf8_append(out, cp);
  return out;
}

bool utf8_valid(std::string_view s) {
  for (size_t pos = 0; pos < s.size();) {
    const Utf8Step step = utf8_next(s, pos);
    if (!step.valid) return false;
    pos += static_cast<size_t>(step.len);
  }
  return true;
}

}  // namespace curator::util
