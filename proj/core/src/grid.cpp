#include "nlfilt/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace nlfilt {

std::string to_string(Closure closure) {
  return closure == Closure::censored ? "censored" : "dirichlet_zero";
}

Closure closure_from_string(const std::string& name) {
  if (name == "censored") return Closure::censored;
  if (name == "dirichlet_zero" || name == "dirichlet") return Closure::dirichlet_zero;
  throw std::invalid_argument("unknown closure '" + name + "' (expected censored or dirichlet_zero)");
}

void GridSpec::validate() const {
  if (n < 1) throw std::invalid_argument("grid: n must be >= 1");
  if (!(half_extent_z > 0.0) || !(half_extent_s > 0.0)) {
    throw std::invalid_argument("grid: half extents must be > 0");
  }
  if (points_per_axis_z < 3 || points_per_axis_z % 2 == 0 || points_per_axis_s < 3 ||
      points_per_axis_s % 2 == 0) {
    throw std::invalid_argument("grid: points per axis must be odd and >= 3");
  }
}

std::size_t GridSpec::node_count() const {
  std::size_t count = static_cast<std::size_t>(points_per_axis_s);
  for (int k = 0; k < 2 * n; ++k) count *= static_cast<std::size_t>(points_per_axis_z);
  return count;
}

double GridSpec::cell_volume() const {
  return std::pow(h_z(), 2 * n) * h_s();
}

void GridSpec::node_coords(std::size_t i, double* out) const {
  const auto ps = static_cast<std::size_t>(points_per_axis_s);
  const auto pz = static_cast<std::size_t>(points_per_axis_z);
  out[2 * n] = -half_extent_s + static_cast<double>(i % ps) * h_s();
  i /= ps;
  const double hz = h_z();
  for (int k = 2 * n - 1; k >= 0; --k) {
    out[k] = -half_extent_z + static_cast<double>(i % pz) * hz;
    i /= pz;
  }
}

GroupPoint GridSpec::node_point(std::size_t i) const {
  std::vector<double> c(static_cast<std::size_t>(coords_per_node()));
  node_coords(i, c.data());
  return GroupPoint::from_coords(c);
}

std::vector<double> GridSpec::all_coords() const {
  const std::size_t count = node_count();
  const auto stride = static_cast<std::size_t>(coords_per_node());
  std::vector<double> c(count * stride);
  for (std::size_t i = 0; i < count; ++i) node_coords(i, c.data() + i * stride);
  return c;
}

std::size_t GridSpec::center_index() const {
  const auto ps = static_cast<std::size_t>(points_per_axis_s);
  const auto pz = static_cast<std::size_t>(points_per_axis_z);
  std::size_t idx = 0;
  for (int k = 0; k < 2 * n; ++k) idx = idx * pz + pz / 2;
  return idx * ps + ps / 2;
}

DiscreteField::DiscreteField(const GridSpec& g, double fill)
    : grid(g), values(g.node_count(), fill) {}

DiscreteField::DiscreteField(const GridSpec& g, std::vector<double> v)
    : grid(g), values(std::move(v)) {
  if (values.size() != grid.node_count()) {
    throw std::invalid_argument("DiscreteField: value count does not match grid");
  }
}

void DiscreteField::check() const {
  if (values.size() != grid.node_count()) {
    throw std::invalid_argument("DiscreteField: value count does not match grid");
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw std::invalid_argument("DiscreteField: non-finite value");
  }
}

void require_same_grid(const DiscreteField& a, const DiscreteField& b, const char* op) {
  if (!(a.grid == b.grid) || a.values.size() != b.values.size()) {
    throw std::invalid_argument(std::string(op) + ": grid mismatch");
  }
}

double lp_norm(const DiscreteField& f, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be >= 1");
  if (std::isinf(p)) {
    double m = 0.0;
    for (double v : f.values) m = std::max(m, std::abs(v));
    return m;
  }
  double sum = 0.0;
  if (p == 1.0) {
    for (double v : f.values) sum += std::abs(v);
  } else if (p == 2.0) {
    for (double v : f.values) sum += v * v;
  } else {
    for (double v : f.values) sum += std::pow(std::abs(v), p);
  }
  return std::pow(sum * f.grid.cell_volume(), 1.0 / p);
}

double mass(const DiscreteField& f) {
  double sum = 0.0;
  for (double v : f.values) sum += v;
  return sum * f.grid.cell_volume();
}

double inner(const DiscreteField& f, const DiscreteField& g) {
  require_same_grid(f, g, "inner");
  double sum = 0.0;
  for (std::size_t i = 0; i < f.values.size(); ++i) sum += f.values[i] * g.values[i];
  return sum * f.grid.cell_volume();
}

DiscreteField signed_power(const DiscreteField& f, double q) {
  DiscreteField out(f.grid);
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    const double v = f.values[i];
    out.values[i] = q == 1.0 ? v : std::copysign(std::pow(std::abs(v), q), v);
  }
  return out;
}

bool interpolate(const DiscreteField& f, const double* coords, double& value) {
  const GridSpec& g = f.grid;
  const int dims = g.coords_per_node();
  std::vector<std::size_t> base(static_cast<std::size_t>(dims));
  std::vector<double> frac(static_cast<std::size_t>(dims));
  std::vector<std::size_t> counts(static_cast<std::size_t>(dims));
  for (int k = 0; k < dims; ++k) {
    const bool is_s = k == 2 * g.n;
    const double half = is_s ? g.half_extent_s : g.half_extent_z;
    const double h = is_s ? g.h_s() : g.h_z();
    const int pts = is_s ? g.points_per_axis_s : g.points_per_axis_z;
    const double t = (coords[k] + half) / h;
    constexpr double eps = 1e-12;
    if (t < -eps || t > (pts - 1) + eps) return false;
    const double tc = std::clamp(t, 0.0, static_cast<double>(pts - 1));
    auto cell = static_cast<std::size_t>(std::floor(tc));
    if (cell >= static_cast<std::size_t>(pts - 1)) cell = static_cast<std::size_t>(pts - 2);
    base[k] = cell;
    frac[k] = tc - static_cast<double>(cell);
    counts[k] = static_cast<std::size_t>(pts);
  }
  double acc = 0.0;
  const unsigned corners = 1u << dims;
  for (unsigned c = 0; c < corners; ++c) {
    double w = 1.0;
    std::size_t idx = 0;
    for (int k = 0; k < dims; ++k) {
      const bool up = (c >> k) & 1u;
      w *= up ? frac[k] : 1.0 - frac[k];
      idx = idx * counts[k] + base[k] + (up ? 1 : 0);
    }
    if (w != 0.0) acc += w * f.values[idx];
  }
  value = acc;
  return true;
}

}  // namespace nlfilt
