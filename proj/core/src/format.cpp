#include "papevo/format.hpp"

#include <charconv>
#include <cmath>

namespace papevo {

std::string fmtg(double x, int digits) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, digits);
  return std::string(buf, res.ptr);
}

std::string fmt17(double x) { return fmtg(x, 17); }

}  // namespace papevo
