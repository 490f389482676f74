#pragma once

#include <cctype>
#include <charconv>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace apc {

namespace detail {

inline std::optional<int> parse_int(std::string_view s) {
  int value = 0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || s.empty()) return std::nullopt;
  return value;
}

}  // namespace detail

// Character offsets throughout the toolkit count Unicode scalar values, not
// bytes, so offsets written to TSV stay portable across languages and tools.

inline bool utf8_continuation(unsigned char c) { return (c & 0xC0) == 0x80; }

inline std::size_t utf8_length(std::string_view s) {
  std::size_t n = 0;
  for (unsigned char c : s) {
    if (!utf8_continuation(c)) ++n;
  }
  return n;
}

// Byte position of the scalar at `offset`; equals s.size() when offset is the
// scalar length of s.
inline std::size_t utf8_byte_of(std::string_view s, std::size_t offset) {
  std::size_t seen = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!utf8_continuation(static_cast<unsigned char>(s[i]))) {
      if (seen == offset) return i;
      ++seen;
    }
  }
  if (seen == offset) return s.size();
  throw std::out_of_range("utf8 offset past end of string");
}

inline std::string utf8_substr(std::string_view s, std::size_t offset,
                               std::size_t count) {
  std::size_t from = utf8_byte_of(s, offset);
  std::size_t to = utf8_byte_of(s, offset + count);
  return std::string(s.substr(from, to - from));
}

inline std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

inline bool equals_ci(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(a[i])) !=
        std::tolower(static_cast<unsigned char>(b[i]))) {
      return false;
    }
  }
  return true;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.push_back(s.substr(start));
      break;
    }
    parts.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
  return parts;
}

inline std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> parts;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) parts.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return parts;
}

// Word characters for boundary checks. Non-ASCII bytes are treated as word
// characters so multi-byte letters are never mistaken for a boundary.
inline bool word_char(unsigned char c) {
  return std::isalnum(c) != 0 || c >= 0x80;
}

// True when `needle` occurs inside `hay` flanked by non-word characters or
// the string edge.
inline bool substring_on_boundaries(std::string_view needle,
                                    std::string_view hay) {
  if (needle.empty() || needle.size() > hay.size()) return false;
  for (std::size_t pos = hay.find(needle); pos != std::string_view::npos;
       pos = hay.find(needle, pos + 1)) {
    bool left_ok =
        pos == 0 || !word_char(static_cast<unsigned char>(hay[pos - 1]));
    std::size_t end = pos + needle.size();
    bool right_ok =
        end == hay.size() || !word_char(static_cast<unsigned char>(hay[end]));
    if (left_ok && right_ok) return true;
  }
  return false;
}

// Symmetric token-boundary substring test used for mention alignment:
// "Ann" does not match inside "Annette", but "Mari" matches "Mari Motohashi".
inline bool surfaces_overlap(std::string_view a, std::string_view b) {
  return substring_on_boundaries(a, b) || substring_on_boundaries(b, a);
}

}  // namespace apc
