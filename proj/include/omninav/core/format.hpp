#pragma once

#include <charconv>
#include <string>

namespace omninav {

// Shortest round-trip decimal form. Used for all file artifacts so that
// identical runs serialize byte-identically.
inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return {buf, res.ptr};
}

inline std::string format_double_fixed(double v, int precision) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, precision);
  return {buf, res.ptr};
}

}  // namespace omninav
