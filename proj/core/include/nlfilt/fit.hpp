#pragma once

#include <cstddef>
#include <span>

namespace nlfilt {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t points = 0;
};

/// Ordinary least squares y = intercept + slope * x. Needs >= 2 distinct x.
LinearFit fit_linear(std::span<const double> x, std::span<const double> y);

/// Least squares on (log x, log y); every value must be positive.
LinearFit fit_power_law(std::span<const double> x, std::span<const double> y);

}  // namespace nlfilt
