#include "nlfilt/hgroup.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace nlfilt {

namespace {

void require_same_dim(const GroupPoint& a, const GroupPoint& b, const char* op) {
  if (a.xi.size() != b.xi.size() || a.eta.size() != b.eta.size() ||
      a.xi.size() != a.eta.size() || b.xi.size() != b.eta.size()) {
    throw std::invalid_argument(std::string(op) + ": dimension mismatch");
  }
}

double unit_sphere_area(int dim) {
  // |S^{dim-1}| = 2 pi^{dim/2} / Gamma(dim/2)
  return 2.0 * std::pow(std::numbers::pi, 0.5 * dim) / std::tgamma(0.5 * dim);
}

}  // namespace

GroupPoint::GroupPoint(std::vector<double> xi_, std::vector<double> eta_, double s_)
    : xi(std::move(xi_)), eta(std::move(eta_)), s(s_) {
  if (xi.size() != eta.size()) {
    throw std::invalid_argument("GroupPoint: xi and eta must have the same length");
  }
}

GroupPoint GroupPoint::neutral(int n) {
  if (n < 1) throw std::invalid_argument("GroupPoint::neutral: n must be >= 1");
  return GroupPoint(std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), 0.0);
}

GroupPoint GroupPoint::from_coords(std::span<const double> coords) {
  if (coords.size() < 3 || coords.size() % 2 == 0) {
    throw std::invalid_argument("GroupPoint::from_coords: expected 2n+1 coordinates");
  }
  const std::size_t n = (coords.size() - 1) / 2;
  return GroupPoint(std::vector<double>(coords.begin(), coords.begin() + n),
                    std::vector<double>(coords.begin() + n, coords.begin() + 2 * n),
                    coords[2 * n]);
}

std::vector<double> GroupPoint::coords() const {
  std::vector<double> c;
  c.reserve(2 * xi.size() + 1);
  c.insert(c.end(), xi.begin(), xi.end());
  c.insert(c.end(), eta.begin(), eta.end());
  c.push_back(s);
  return c;
}

GroupPoint mul(const GroupPoint& a, const GroupPoint& b) {
  require_same_dim(a, b, "mul");
  const std::size_t n = a.xi.size();
  GroupPoint out;
  out.xi.resize(n);
  out.eta.resize(n);
  double twist = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    out.xi[k] = a.xi[k] + b.xi[k];
    out.eta[k] = a.eta[k] + b.eta[k];
    twist += a.eta[k] * b.xi[k] - a.xi[k] * b.eta[k];
  }
  out.s = a.s + b.s + 2.0 * twist;
  return out;
}

GroupPoint inv(const GroupPoint& a) {
  GroupPoint out = a;
  for (auto& v : out.xi) v = -v;
  for (auto& v : out.eta) v = -v;
  out.s = -out.s;
  return out;
}

GroupPoint dilate(double lambda, const GroupPoint& a) {
  if (!(lambda > 0.0)) throw std::invalid_argument("dilate: lambda must be > 0");
  GroupPoint out = a;
  for (auto& v : out.xi) v *= lambda;
  for (auto& v : out.eta) v *= lambda;
  out.s *= lambda * lambda;
  return out;
}

double knorm(const GroupPoint& a) {
  double z2 = 0.0;
  for (double v : a.xi) z2 += v * v;
  for (double v : a.eta) z2 += v * v;
  return std::sqrt(std::sqrt(z2 * z2 + a.s * a.s));
}

double kdist(const GroupPoint& a, const GroupPoint& b) {
  require_same_dim(a, b, "kdist");
  return knorm(mul(inv(a), b));
}

namespace {

// Direct nested quadrature over one shell a <= |x| <= b with b <= 2a, in
// (r, s) = (|z|, s) coordinates. The s-limits sqrt(a^4 - r^4) and
// sqrt(b^4 - r^4) have square-root kinks at r = a and r = b; near those the
// outer variable is changed to u = sqrt(c^4 - r^4), which makes every
// integrand smooth.
double shell_piece(int n, double exponent, double a, double b) {
  using boost::math::quadrature::gauss_kronrod;
  constexpr double tol = 1e-13;
  constexpr unsigned depth = 15;
  const int Q = homogeneous_degree(n);
  const double power = 0.25 * (exponent - Q);
  const double a4 = a * a * a * a;
  const double b4 = b * b * b * b;

  // 2 r^{2n-1} int_{s_lo}^{s_hi} (r^4 + s^2)^power ds
  auto slice = [&](double r) {
    const double r4 = r * r * r * r;
    const double s_lo = r4 < a4 ? std::sqrt(a4 - r4) : 0.0;
    const double s_hi = std::sqrt(std::max(0.0, b4 - r4));
    if (!(s_hi > s_lo)) return 0.0;
    auto f = [&](double s) { return std::pow(r4 + s * s, power); };
    const double inner = gauss_kronrod<double, 31>::integrate(f, s_lo, s_hi, depth, tol);
    return 2.0 * inner * std::pow(r, 2 * n - 1);
  };
  // r = (c^4 - u^2)^{1/4}, dr = u / (2 r^3) du
  auto via_u = [&](double c4) {
    return [&, c4](double u) {
      const double r = std::sqrt(std::sqrt(c4 - u * u));
      return slice(r) * u / (2.0 * r * r * r);
    };
  };

  const double r_mid = 0.5 * a;
  const double r_mid4 = r_mid * r_mid * r_mid * r_mid;
  const double inner_core = gauss_kronrod<double, 31>::integrate(slice, 0.0, r_mid, depth, tol);
  const double inner_edge = gauss_kronrod<double, 31>::integrate(via_u(a4), 0.0, std::sqrt(a4 - r_mid4), depth, tol);
  const double outer = gauss_kronrod<double, 31>::integrate(via_u(b4), 0.0, std::sqrt(b4 - a4), depth, tol);
  return unit_sphere_area(2 * n) * (inner_core + inner_edge + outer);
}

}  // namespace

double koranyi_shell_integral(int n, double exponent, double a, double b) {
  if (n < 1) throw std::invalid_argument("koranyi_shell_integral: n must be >= 1");
  if (!(a > 0.0) || !(b > a)) {
    throw std::invalid_argument("koranyi_shell_integral: need 0 < a < b");
  }
  if (std::isinf(b)) {
    if (!(exponent < 0.0)) throw std::invalid_argument("koranyi_shell_integral: b = inf needs exponent < 0");
    // dilation by 2 scales each dyadic shell by 2^exponent: geometric series
    return shell_piece(n, exponent, a, 2.0 * a) / (1.0 - std::pow(2.0, exponent));
  }
  double acc = 0.0;
  for (double lo = a; lo < b;) {
    const double hi = std::min(2.0 * lo, b);
    acc += shell_piece(n, exponent, lo, hi);
    lo = hi;
  }
  return acc;
}

GroupContext make_group_context(int n) {
  if (n < 1) throw std::invalid_argument("make_group_context: n must be >= 1");
  static std::mutex mutex;
  static std::map<int, double> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) {
    // C0 = Q |B_1| with |B_1| = |S^{2n-1}| int_0^1 2 sqrt(1 - r^4) r^{2n-1} dr
    const double ball = unit_sphere_area(2 * n) * 0.5 * std::beta(0.5 * n, 1.5);
    const double c0 = homogeneous_degree(n) * ball;
    it = cache.emplace(n, c0).first;
  }
  return GroupContext{n, homogeneous_degree(n), it->second};
}

}  // namespace nlfilt
