#pragma once

#include <cstdio>
#include <string>

namespace anchorfit {

/// Fixed textual form for reals in every emitted file: 9 significant digits.
inline std::string format_real(double value) {
  if (value == 0.0) value = 0.0;  // fold -0
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", value);
  return buf;
}

}  // namespace anchorfit
