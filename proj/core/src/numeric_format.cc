#include "lipsyn/numeric_format.h"

#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace lipsyn {

std::string format_significant(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

double round_significant(double v, int digits) {
  if (!std::isfinite(v)) return v;
  return std::strtod(format_significant(v, digits).c_str(), nullptr);
}

}  // namespace lipsyn
