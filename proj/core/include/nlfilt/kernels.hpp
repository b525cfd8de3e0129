#pragma once

// Admissible jump kernels J(x, y) on H^n:
//   Lambda^{-1} d^{-(Q+alpha)} <= J(x, y) <= Lambda d^{-(Q+alpha)},  d = kdist(x, y)
//   J(x, x.y) = J(x, x.y^{-1}).
// The built-in families are radial in the Koranyi distance; a custom hook
// accepts arbitrary (possibly x-dependent) kernels.

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "nlfilt/hgroup.hpp"

namespace nlfilt {

enum class KernelFamily { pure_power, log_rough, tabulated_radial, custom };

std::string to_string(KernelFamily family);
KernelFamily kernel_family_from_string(const std::string& name);

/// Piecewise-linear multiplier profile m(d) with constant extrapolation.
struct RadialProfile {
  std::vector<double> distance;
  std::vector<double> multiplier;

  double operator()(double d) const;
  bool empty() const noexcept { return distance.empty(); }

  /// Two-column CSV (distance, multiplier); '#' comments and one optional
  /// header line are skipped. Distances must be strictly increasing.
  static RadialProfile load_csv(const std::string& path);
  static RadialProfile from_points(std::vector<double> distance, std::vector<double> multiplier);
};

/// J(x, y) on packed coordinates (xi..., eta..., s).
using CustomKernel = std::function<double(std::span<const double> x, std::span<const double> y)>;

struct KernelSpec {
  double alpha = 1.0;
  double Lambda = 1.0;
  KernelFamily family = KernelFamily::pure_power;
  double amplitude = 0.0;  // log_rough
  RadialProfile profile;   // tabulated_radial
  CustomKernel custom;     // custom

  static KernelSpec pure_power(double alpha);
  /// Lambda defaults to 1 / (1 - amplitude), the tight envelope of 1 + a sin(log d).
  static KernelSpec log_rough(double alpha, double amplitude, double Lambda = 0.0);
  static KernelSpec tabulated(double alpha, double Lambda, RadialProfile profile);
  static KernelSpec from_function(double alpha, double Lambda, CustomKernel fn);

  bool radial() const noexcept { return family != KernelFamily::custom; }

  /// Multiplier of d^{-(Q+alpha)} for radial families; tabulated values are
  /// clipped to [1/Lambda, Lambda].
  double multiplier(double d) const;

  /// Multiplier before clipping. Used by validation.
  double raw_multiplier(double d) const;

  /// Radial value d^{-(Q+alpha)} * multiplier(d). Requires radial().
  double radial_value(double d, int Q) const;

  /// Throws std::invalid_argument when alpha/Lambda/family parameters are out of range.
  void check_parameters() const;
};

/// J(x, y). Throws SingularityError when x == y.
double eval_kernel(const KernelSpec& spec, const GroupPoint& x, const GroupPoint& y);

/// Same as eval_kernel on packed coordinates; d must be kdist(x, y) > 0.
double eval_kernel_coords(const KernelSpec& spec, const double* x, const double* y, int n, double d);

struct SingularityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ValidationReport {
  std::size_t samples = 0;
  double worst_upper_ratio = 0.0;   // max J d^{Q+alpha}
  double worst_lower_ratio = 0.0;   // max 1 / (J d^{Q+alpha})
  double reflection_residual = 0.0; // max |J(x,x.y) - J(x,x.y^{-1})| / J
  double pair_residual = 0.0;       // max |J(x,y) - J(y,x)| / J
  bool passed = false;
  std::vector<std::string> failures;
  std::vector<std::string> warnings;
};

ValidationReport validate_kernel(const KernelSpec& spec, const GroupContext& ctx,
                                 std::size_t sample_count, std::uint64_t seed);

/// int_{d(x,y) >= R} J(x, y) dy for a radial kernel, i.e.
/// C0 * int_R^inf r^{-1-alpha} multiplier(r) dr.
double radial_tail_integral(const KernelSpec& spec, const GroupContext& ctx, double R);

}  // namespace nlfilt
