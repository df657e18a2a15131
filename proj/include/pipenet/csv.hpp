#ifndef PIPENET_CSV_HPP
#define PIPENET_CSV_HPP

#include <cstdio>
#include <fstream>
#include <string>

#include "pipenet/errors.hpp"

namespace pipenet {

/// Fixed 6-significant-digit formatting so repeated runs produce identical bytes.
inline std::string format_g6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open output file: " + path);
  return out;
}

}  // namespace pipenet

#endif  // PIPENET_CSV_HPP
