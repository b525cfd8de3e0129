#pragma once

// Heisenberg group H^n in (xi, eta, s) coordinates with the group law
//   x . x' = (xi + xi', eta + eta', s + s' + 2<eta, xi'> - 2<xi, eta'>),
// parabolic dilations and the Koranyi quasi-norm (|z|^4 + s^2)^{1/4}.

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace nlfilt {

struct GroupPoint {
  std::vector<double> xi;
  std::vector<double> eta;
  double s = 0.0;

  GroupPoint() = default;
  GroupPoint(std::vector<double> xi_, std::vector<double> eta_, double s_);

  /// Neutral element of H^n.
  static GroupPoint neutral(int n);

  /// Point from packed coordinates (xi_1..xi_n, eta_1..eta_n, s).
  static GroupPoint from_coords(std::span<const double> coords);

  int dim() const noexcept { return static_cast<int>(xi.size()); }
  std::vector<double> coords() const;

  friend bool operator==(const GroupPoint&, const GroupPoint&) = default;
};

/// Per-n constants: homogeneous degree Q = 2n + 2 and the polar constant C0
/// for which  int_{a<=|x|<=b} |x|^{e-Q} dx = C0 (b^e - a^e) / e.
struct GroupContext {
  int n = 1;
  int Q = 4;
  double C0 = 0.0;
};

/// Builds the context for H^n. C0 = Q |B_1| in closed form (cached per n).
GroupContext make_group_context(int n);

GroupPoint mul(const GroupPoint& a, const GroupPoint& b);
GroupPoint inv(const GroupPoint& a);
GroupPoint dilate(double lambda, const GroupPoint& a);
double knorm(const GroupPoint& a);
double kdist(const GroupPoint& a, const GroupPoint& b);

constexpr int homogeneous_degree(int n) noexcept { return 2 * n + 2; }

/// Critical exponent m* = (Q - alpha) / Q.
constexpr double critical_exponent(int Q, double alpha) noexcept {
  return (Q - alpha) / Q;
}

/// Integrability threshold p*(m) = (1 - m) Q / alpha.
constexpr double integrability_threshold(double m, int Q, double alpha) noexcept {
  return (1.0 - m) * Q / alpha;
}

/// Adaptive quadrature of int_{a<=|x|<=b} |x|^{exponent-Q} dx over H^n.
/// b may be +infinity when exponent < 0.
double koranyi_shell_integral(int n, double exponent, double a, double b);

namespace detail {

// Hot-loop variant on packed coordinates; no allocation, no checks.
inline double koranyi_distance(const double* a, const double* b, int n) noexcept {
  double z2 = 0.0;
  double twist = 0.0;
  for (int k = 0; k < n; ++k) {
    const double dxi = b[k] - a[k];
    const double deta = b[n + k] - a[n + k];
    z2 += dxi * dxi + deta * deta;
    // s-component of a^{-1} . b
    twist += -a[n + k] * b[k] + a[k] * b[n + k];
  }
  const double ds = b[2 * n] - a[2 * n] + 2.0 * twist;
  return std::sqrt(std::sqrt(z2 * z2 + ds * ds));
}

}  // namespace detail

}  // namespace nlfilt
