#pragma once

#include <cstdio>
#include <string>

namespace dtlab {

// Shortest round-trippable decimal form used for every numeric output, so
// identical runs serialize to identical bytes.
inline std::string fmt_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace dtlab
