#pragma once

// Quadrature realization of
//   (Lf)(x) = 1/2 int (2 f(x) - f(x.y) - f(x.y^{-1})) J dmu(y)
// on a truncated lattice:
//   (Lf)_i = sum_j w_ij (f_i - f_j) + tail_i f_i,
//   w_ij = 1/2 [J(x_i, x_j) + J(x_j, x_i)] cellvol   for rho0 <= d_ij < far,
// where rho0 = inner_cutoff_factor * max(h_z, sqrt(h_s)) removes the
// principal-value ball and `far` is the optional far-field radius. Under the
// dirichlet_zero closure tail_i = int_{exterior} J(x_i, y) dy models a zero
// field outside the computed region.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "nlfilt/grid.hpp"
#include "nlfilt/hgroup.hpp"
#include "nlfilt/kernels.hpp"

namespace nlfilt {

struct QuadratureConfig {
  double inner_cutoff_factor = 2.0;
  /// Unset ("auto"): the exterior is everything outside the lattice box.
  /// Set to R: pairs at distance >= R are dropped from the weights and the
  /// region d(x_i, y) >= R acts as the zero exterior; the gap between the box
  /// and that ball is censored.
  std::optional<double> tail_radius;
  int subcell_refinement = 0;
  /// Grids up to this many nodes keep the full weight matrix in memory;
  /// larger grids recompute weights on every apply.
  std::size_t dense_threshold = 8000;
  /// Monte Carlo controls, used only for tails of non-radial kernels.
  std::uint64_t seed = 12345;
  std::size_t tail_samples = 20000;

  void validate() const;
};

class NonlocalOperator {
 public:
  const GridSpec& grid() const noexcept { return grid_; }
  const KernelSpec& kernel() const noexcept { return kernel_; }
  const GroupContext& context() const noexcept { return ctx_; }
  const QuadratureConfig& quadrature() const noexcept { return quad_; }
  std::size_t size() const noexcept { return count_; }
  double inner_cutoff_rho0() const noexcept { return rho0_; }
  /// +inf when no far-field radius is configured.
  double far_cutoff() const noexcept { return far_; }
  double cell_volume() const noexcept { return cellvol_; }
  bool dense() const noexcept { return !weights_.empty(); }

  /// Symmetric weight w_ij (0 for excluded pairs and i == j).
  double weight(std::size_t i, std::size_t j) const;
  std::span<const double> tail_coefficient() const noexcept { return tail_; }
  /// sum_j w_ij for each row.
  std::span<const double> row_sums() const noexcept { return row_sum_; }
  /// Diagonal of the operator matrix, row_sum_i + tail_i.
  double diagonal(std::size_t i) const noexcept { return row_sum_[i] + tail_[i]; }

  /// out = scale * L f.
  void apply(std::span<const double> f, std::span<double> out, double scale = 1.0) const;

  /// Radius at which a pure-power tail C0 R^{-alpha} / alpha equals tail_i.
  double effective_exterior_radius(std::size_t i) const;

 private:
  friend NonlocalOperator assemble(const GridSpec&, const KernelSpec&, const QuadratureConfig&);
  friend NonlocalOperator operator_from_weights(const GridSpec&, std::vector<double>, std::vector<double>);

  double compute_weight(std::size_t i, std::size_t j) const;
  void apply_rows(std::span<const double> f, std::span<double> out, double scale,
                  std::size_t lo, std::size_t hi) const;

  GridSpec grid_;
  KernelSpec kernel_;
  GroupContext ctx_;
  QuadratureConfig quad_;
  std::size_t count_ = 0;
  int stride_ = 3;
  double rho0_ = 0.0;
  double far_ = 0.0;
  double cellvol_ = 0.0;
  std::vector<double> coords_;
  std::vector<double> sub_offsets_;  // subcell sample offsets, packed
  std::vector<double> weights_;      // dense row-major, empty when streamed
  std::vector<double> row_sum_;
  std::vector<double> tail_;
};

/// Inner cutoff rho0 for a grid and config.
double inner_cutoff(const GridSpec& grid, const QuadratureConfig& quad);

NonlocalOperator assemble(const GridSpec& grid, const KernelSpec& kernel,
                          const QuadratureConfig& quad = {});

/// Operator with explicitly given dense weights (row-major, symmetric,
/// nonnegative, zero diagonal) and tail coefficients. Useful for small model
/// systems such as a single interacting pair.
NonlocalOperator operator_from_weights(const GridSpec& grid, std::vector<double> weights,
                                       std::vector<double> tail);

DiscreteField apply(const NonlocalOperator& op, const DiscreteField& f);

/// E_J(f, g) = cellvol * [ 1/2 sum_{i,j} w_ij (f_i - f_j)(g_i - g_j) + sum_i tail_i f_i g_i ],
/// equal to <L f, g>_mu.
double dirichlet_form(const NonlocalOperator& op, const DiscreteField& f, const DiscreteField& g);

/// int_{a <= |x| <= b} |x|^{exponent - Q} dmu by adaptive quadrature.
double annulus_integral(const GroupContext& ctx, double exponent, double a, double b);

}  // namespace nlfilt
