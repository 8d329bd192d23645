#pragma once

#include <charconv>
#include <string>

namespace overage {

/// Shortest round-trip decimal form, independent of the C locale.
inline std::string format_number(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, end);
}

}  // namespace overage
