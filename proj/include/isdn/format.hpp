#pragma once

#include <cstdio>
#include <cstdlib>
#include <string>

namespace isdn {

// All float output goes through here: 12 significant digits.
inline std::string fmt12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline double round12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return std::strtod(buf, nullptr);
}

}  // namespace isdn
