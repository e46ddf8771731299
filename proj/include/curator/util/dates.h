#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace curator::util {

// ISO-8601 calendar date. Lexicographic order on the canonical string form
// equals chronological order, which the date filters rely on.
struct IsoDate {
  int year = 0;
  int month = 0;
  int day = 0;

  std::string str() const;
  auto operator<=>(const IsoDate&) const = default;
};

// Strict "YYYY-MM-DD" with calendar validation; nullopt when malformed.
std::optional<IsoDate> parse_iso_date(std::string_view s);

}  // namespace curator::util
