#pragma once

#include <cmath>
#include <cstddef>
#include <cstdio>
#include <string>

namespace uselfa {

// Fixed-point text with a given number of decimals; negative zero prints
// without its sign so output bytes do not depend on rounding direction.
inline std::string fixed(double v, std::size_t decimals = 6) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const int len = std::snprintf(buf, sizeof buf, "%.*f", static_cast<int>(decimals), v);
  std::string s(buf, static_cast<std::size_t>(len));
  if (!s.empty() && s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

// Shortest "%g"-style text that still shows a decimal point (0 -> "0.0").
inline std::string grid_label(double v) {
  char buf[64];
  const int len = std::snprintf(buf, sizeof buf, "%.10g", v);
  std::string s(buf, static_cast<std::size_t>(len));
  if (s == "-0") s = "0";
  if (s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

}  // namespace uselfa
