#pragma once

#include <cstdio>
#include <string>

namespace ptchain {

// shortest useful fixed formatting; also what the CSV writers use, so files
// are byte-stable across runs
inline std::string fmt_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace ptchain
