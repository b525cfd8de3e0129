#pragma once

// Truncated uniform lattice on H^n and fields living on it. Haar measure is
// Lebesgue measure, so every node carries the same cell volume.

#include <cstddef>
#include <string>
#include <vector>

#include "nlfilt/hgroup.hpp"

namespace nlfilt {

enum class Closure { censored, dirichlet_zero };

std::string to_string(Closure closure);
Closure closure_from_string(const std::string& name);

struct GridSpec {
  int n = 1;
  double half_extent_z = 2.0;
  double half_extent_s = 2.0;
  int points_per_axis_z = 9;
  int points_per_axis_s = 9;
  Closure closure = Closure::censored;

  /// Throws std::invalid_argument unless extents are positive and counts odd >= 3.
  void validate() const;

  std::size_t node_count() const;
  int coords_per_node() const noexcept { return 2 * n + 1; }
  double h_z() const { return 2.0 * half_extent_z / (points_per_axis_z - 1); }
  double h_s() const { return 2.0 * half_extent_s / (points_per_axis_s - 1); }
  double cell_volume() const;

  /// Writes the 2n+1 coordinates of node i; s is the fastest axis.
  void node_coords(std::size_t i, double* out) const;
  GroupPoint node_point(std::size_t i) const;

  /// Packed coordinates of every node, node_count() x (2n+1).
  std::vector<double> all_coords() const;

  /// Index of the node at the origin.
  std::size_t center_index() const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

struct DiscreteField {
  GridSpec grid;
  std::vector<double> values;

  DiscreteField() = default;
  explicit DiscreteField(const GridSpec& g, double fill = 0.0);
  DiscreteField(const GridSpec& g, std::vector<double> v);

  std::size_t size() const noexcept { return values.size(); }
  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }

  /// Throws unless node count matches and every value is finite.
  void check() const;
};

void require_same_grid(const DiscreteField& a, const DiscreteField& b, const char* op);

/// Haar-weighted (sum |f_i|^p cellvol)^{1/p}; p = +inf gives max |f_i|.
double lp_norm(const DiscreteField& f, double p);
double mass(const DiscreteField& f);
/// <f, g>_mu = sum f_i g_i cellvol.
double inner(const DiscreteField& f, const DiscreteField& g);

/// sign(u)|u|^q, pointwise.
DiscreteField signed_power(const DiscreteField& f, double q);

/// Multilinear interpolation at an arbitrary point; returns false when the
/// point lies outside the lattice box.
bool interpolate(const DiscreteField& f, const double* coords, double& value);

// Field files. CSV columns: xi_1..xi_n, eta_1..eta_n, s, value.
void write_field_csv(const DiscreteField& f, const std::string& path);
DiscreteField read_field_csv(const GridSpec& grid, const std::string& path);

// Flat binary: magic "NLFFIELD", u32 version, u32 n, u32 points_z,
// u32 points_s, f64 half_z, f64 half_s, u32 closure, then node_count f64
// values in node order, all little-endian.
void write_field_binary(const DiscreteField& f, const std::string& path);
DiscreteField read_field_binary(const std::string& path);

}  // namespace nlfilt
