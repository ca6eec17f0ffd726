#pragma once

#include <string>

namespace papevo {

/// Locale-independent shortest-round-trip-safe "%.17g".
std::string fmt17(double x);

/// Locale-independent "%.<digits>g".
std::string fmtg(double x, int digits);

}  // namespace papevo
