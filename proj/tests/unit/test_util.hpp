#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "nlfilt/grid.hpp"
#include "nlfilt/hgroup.hpp"
#include "nlfilt/random.hpp"

namespace testutil {

inline nlfilt::GroupPoint random_point(nlfilt::Rng& rng, int n, double scale) {
  std::vector<double> xi(static_cast<std::size_t>(n)), eta(static_cast<std::size_t>(n));
  for (auto& v : xi) v = rng.uniform(-scale, scale);
  for (auto& v : eta) v = rng.uniform(-scale, scale);
  return nlfilt::GroupPoint(xi, eta, rng.uniform(-scale * scale, scale * scale));
}

inline double determinant(std::vector<double> a, int n) {
  double det = 1.0;
  for (int c = 0; c < n; ++c) {
    int pivot = c;
    for (int r = c + 1; r < n; ++r) {
      if (std::abs(a[r * n + c]) > std::abs(a[pivot * n + c])) pivot = r;
    }
    if (a[pivot * n + c] == 0.0) return 0.0;
    if (pivot != c) {
      for (int k = 0; k < n; ++k) std::swap(a[c * n + k], a[pivot * n + k]);
      det = -det;
    }
    det *= a[c * n + c];
    for (int r = c + 1; r < n; ++r) {
      const double f = a[r * n + c] / a[c * n + c];
      for (int k = c; k < n; ++k) a[r * n + k] -= f * a[c * n + k];
    }
  }
  return det;
}

inline nlfilt::GridSpec cube(int points, double half = 2.0,
                             nlfilt::Closure closure = nlfilt::Closure::censored) {
  nlfilt::GridSpec g;
  g.points_per_axis_z = points;
  g.points_per_axis_s = points;
  g.half_extent_z = half;
  g.half_extent_s = half;
  g.closure = closure;
  return g;
}

inline nlfilt::DiscreteField random_field(const nlfilt::GridSpec& g, nlfilt::Rng& rng, double lo = -1.0,
                                          double hi = 1.0) {
  nlfilt::DiscreteField f(g);
  for (auto& v : f.values) v = rng.uniform(lo, hi);
  return f;
}

// Grid whose nodes A = 0 and B = 1 interact with weight w and nothing else.
inline std::vector<double> pair_weights(std::size_t N, double w) {
  std::vector<double> out(N * N, 0.0);
  out[0 * N + 1] = w;
  out[1 * N + 0] = w;
  return out;
}

}  // namespace testutil
