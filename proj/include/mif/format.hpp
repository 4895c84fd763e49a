#pragma once

#include <charconv>
#include <string>
#include <system_error>

namespace mif {

// Locale-independent shortest round-trip decimal for a double.
inline std::string format_double(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) return "nan";
  return std::string(buf, end);
}

// Fixed number of digits after the decimal point, locale-independent.
inline std::string format_fixed(double x, int digits) {
  char buf[512];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::fixed, digits);
  if (ec != std::errc()) return format_double(x);
  return std::string(buf, end);
}

}  // namespace mif
