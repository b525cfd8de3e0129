#pragma once

// Brute-force reference quadrature for the nonlocal operator. It walks every
// node pair through the GroupPoint API and evaluates the symmetric-difference
// form of L directly, sharing no code with assemble() or apply(). Meant for
// small grids only; subcell refinement is not supported.

#include <vector>

#include "nlfilt/grid.hpp"
#include "nlfilt/kernels.hpp"
#include "nlfilt/nonlocal_operator.hpp"

namespace nlfilt {

struct BruteForceOperator {
  std::size_t count = 0;
  std::vector<double> weights;  // dense, row-major
  std::vector<double> tail;
};

BruteForceOperator brute_force_operator(const GridSpec& grid, const KernelSpec& kernel,
                                        const QuadratureConfig& quad);

std::vector<double> brute_force_apply(const BruteForceOperator& op, const std::vector<double>& f);

/// C0 * int_R^inf r^{-1-alpha} multiplier(r) dr by composite Simpson in log r.
double brute_force_radial_tail(const KernelSpec& kernel, double C0, double R);

struct OracleComparison {
  double max_weight_rel = 0.0;  // max |w - w_ref| / max |w_ref|
  double max_tail_rel = 0.0;
  double max_apply_rel = 0.0;   // max |Lf - Lf_ref| / max |Lf_ref| over the test fields
  bool symmetric = false;       // assembled weights exactly symmetric
};

/// Compares assemble()/apply() against the brute-force path on `fields`
/// random fields drawn from `seed`.
OracleComparison compare_with_oracle(const GridSpec& grid, const KernelSpec& kernel, const QuadratureConfig& quad,
                                     int fields, std::uint64_t seed);

}  // namespace nlfilt
