#pragma once

#include <cstdio>
#include <string>

namespace ncshape {

/// Formats a double with 17 significant digits ("%.17g"), enough to
/// round-trip any IEEE double through text exactly.
inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

} // namespace ncshape
