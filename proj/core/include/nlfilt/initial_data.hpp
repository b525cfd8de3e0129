#pragma once

#include <string>
#include <vector>

#include "nlfilt/grid.hpp"

namespace nlfilt {

/// Initial-data presets. Bumps are the smooth profile
/// amplitude * exp(1 - 1 / (1 - (d / radius)^2)) for d < radius, where d is
/// the Koranyi distance to the bump center.
struct InitialData {
  std::string preset = "koranyi_bump";  // koranyi_bump, koranyi_indicator, two_bump, signed_two_bump
  double amplitude = 1.0;
  double radius = 1.0;
  /// two_bump / signed_two_bump: centers at xi_1 = -separation and +separation.
  double separation = 0.75;

  void validate() const;
};

const std::vector<std::string>& initial_data_presets();

double smooth_bump(double d, double radius);

DiscreteField make_initial_data(const GridSpec& grid, const InitialData& spec);

}  // namespace nlfilt
