#include "nlfilt/initial_data.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nlfilt/hgroup.hpp"

namespace nlfilt {

const std::vector<std::string>& initial_data_presets() {
  static const std::vector<std::string> names{"koranyi_bump", "koranyi_indicator", "two_bump",
                                              "signed_two_bump"};
  return names;
}

void InitialData::validate() const {
  const auto& names = initial_data_presets();
  if (std::find(names.begin(), names.end(), preset) == names.end()) {
    throw std::invalid_argument("initial data: unknown preset '" + preset + "'");
  }
  if (!std::isfinite(amplitude)) throw std::invalid_argument("initial data: amplitude must be finite");
  if (!(radius > 0.0)) throw std::invalid_argument("initial data: radius must be > 0");
  if (!(separation >= 0.0)) throw std::invalid_argument("initial data: separation must be >= 0");
}

double smooth_bump(double d, double radius) {
  const double r = d / radius;
  if (r >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - r * r));
}

DiscreteField make_initial_data(const GridSpec& grid, const InitialData& spec) {
  grid.validate();
  spec.validate();
  DiscreteField f(grid);
  const int dims = grid.coords_per_node();
  std::vector<double> x(static_cast<std::size_t>(dims));
  std::vector<double> origin(static_cast<std::size_t>(dims), 0.0);
  std::vector<double> left = origin, right = origin;
  left[0] = -spec.separation;
  right[0] = spec.separation;
  for (std::size_t i = 0; i < f.size(); ++i) {
    grid.node_coords(i, x.data());
    double v = 0.0;
    if (spec.preset == "koranyi_bump") {
      v = smooth_bump(detail::koranyi_distance(origin.data(), x.data(), grid.n), spec.radius);
    } else if (spec.preset == "koranyi_indicator") {
      v = detail::koranyi_distance(origin.data(), x.data(), grid.n) <= spec.radius ? 1.0 : 0.0;
    } else {
      const double a = smooth_bump(detail::koranyi_distance(right.data(), x.data(), grid.n), spec.radius);
      const double b = smooth_bump(detail::koranyi_distance(left.data(), x.data(), grid.n), spec.radius);
      // signed_two_bump is odd under (xi, eta, s) -> (-xi, eta, -s), so it vanishes at the origin
      v = spec.preset == "two_bump" ? a + b : a - b;
    }
    f[i] = spec.amplitude * v;
  }
  return f;
}

}  // namespace nlfilt
