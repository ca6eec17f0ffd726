#pragma once

#include <span>

namespace papevo {

/// y ~ constant * x^exponent by least squares in log-log coordinates.
struct PowerLawFit {
  double exponent = 0.0;
  double constant = 0.0;
};

/// All x, y must be positive; needs at least two distinct x.
PowerLawFit fit_power_law(std::span<const double> x, std::span<const double> y);

}  // namespace papevo
