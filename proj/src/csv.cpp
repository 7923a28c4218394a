#include "drank/csv.hpp"

#include <cstdio>

namespace drank {

std::string fmt9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace drank
