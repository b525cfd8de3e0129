#include "nlfilt/kernels.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "nlfilt/random.hpp"

namespace nlfilt {

std::string to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::pure_power: return "pure_power";
    case KernelFamily::log_rough: return "log_rough";
    case KernelFamily::tabulated_radial: return "tabulated_radial";
    case KernelFamily::custom: return "custom";
  }
  return "unknown";
}

KernelFamily kernel_family_from_string(const std::string& name) {
  if (name == "pure_power") return KernelFamily::pure_power;
  if (name == "log_rough") return KernelFamily::log_rough;
  if (name == "tabulated_radial") return KernelFamily::tabulated_radial;
  if (name == "custom") return KernelFamily::custom;
  throw std::invalid_argument("unknown kernel family '" + name + "'");
}

double RadialProfile::operator()(double d) const {
  if (distance.empty()) return 1.0;
  if (d <= distance.front()) return multiplier.front();
  if (d >= distance.back()) return multiplier.back();
  const auto it = std::upper_bound(distance.begin(), distance.end(), d);
  const std::size_t hi = static_cast<std::size_t>(it - distance.begin());
  const std::size_t lo = hi - 1;
  const double w = (d - distance[lo]) / (distance[hi] - distance[lo]);
  return (1.0 - w) * multiplier[lo] + w * multiplier[hi];
}

RadialProfile RadialProfile::from_points(std::vector<double> distance, std::vector<double> multiplier) {
  if (distance.size() != multiplier.size() || distance.empty()) {
    throw std::invalid_argument("RadialProfile: need matching, non-empty columns");
  }
  for (std::size_t k = 0; k < distance.size(); ++k) {
    if (!(distance[k] > 0.0) || !std::isfinite(distance[k])) {
      throw std::invalid_argument("RadialProfile: distances must be positive and finite");
    }
    if (!(multiplier[k] > 0.0) || !std::isfinite(multiplier[k])) {
      throw std::invalid_argument("RadialProfile: multipliers must be positive and finite");
    }
    if (k > 0 && !(distance[k] > distance[k - 1])) {
      throw std::invalid_argument("RadialProfile: distances must be strictly increasing");
    }
  }
  RadialProfile p;
  p.distance = std::move(distance);
  p.multiplier = std::move(multiplier);
  return p;
}

RadialProfile RadialProfile::load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("RadialProfile: cannot open '" + path + "'");
  std::vector<double> d;
  std::vector<double> m;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double a = 0.0;
    double b = 0.0;
    if (!(row >> a >> b)) {
      if (d.empty() && line_no == 1) continue;  // header
      throw std::invalid_argument(path + ":" + std::to_string(line_no) + ": expected 'distance,multiplier'");
    }
    d.push_back(a);
    m.push_back(b);
  }
  return from_points(std::move(d), std::move(m));
}

KernelSpec KernelSpec::pure_power(double alpha) {
  KernelSpec k;
  k.alpha = alpha;
  k.Lambda = 1.0;
  k.family = KernelFamily::pure_power;
  k.check_parameters();
  return k;
}

KernelSpec KernelSpec::log_rough(double alpha, double amplitude, double Lambda) {
  KernelSpec k;
  k.alpha = alpha;
  k.family = KernelFamily::log_rough;
  k.amplitude = amplitude;
  k.Lambda = Lambda > 0.0 ? Lambda : 1.0 / (1.0 - amplitude);
  k.check_parameters();
  return k;
}

KernelSpec KernelSpec::tabulated(double alpha, double Lambda, RadialProfile profile) {
  KernelSpec k;
  k.alpha = alpha;
  k.Lambda = Lambda;
  k.family = KernelFamily::tabulated_radial;
  k.profile = std::move(profile);
  k.check_parameters();
  return k;
}

KernelSpec KernelSpec::from_function(double alpha, double Lambda, CustomKernel fn) {
  KernelSpec k;
  k.alpha = alpha;
  k.Lambda = Lambda;
  k.family = KernelFamily::custom;
  k.custom = std::move(fn);
  k.check_parameters();
  return k;
}

void KernelSpec::check_parameters() const {
  if (!(alpha > 0.0 && alpha < 2.0)) throw std::invalid_argument("kernel: alpha must lie in (0, 2)");
  if (!(Lambda >= 1.0)) throw std::invalid_argument("kernel: Lambda must be >= 1");
  switch (family) {
    case KernelFamily::log_rough:
      if (!(amplitude >= 0.0 && amplitude < 1.0)) {
        throw std::invalid_argument("kernel: log_rough amplitude must lie in [0, 1)");
      }
      break;
    case KernelFamily::tabulated_radial:
      if (profile.empty()) throw std::invalid_argument("kernel: tabulated_radial needs a profile");
      break;
    case KernelFamily::custom:
      if (!custom) throw std::invalid_argument("kernel: custom family needs a callable");
      break;
    case KernelFamily::pure_power:
      break;
  }
}

double KernelSpec::raw_multiplier(double d) const {
  switch (family) {
    case KernelFamily::pure_power: return 1.0;
    case KernelFamily::log_rough: return 1.0 + amplitude * std::sin(std::log(d));
    case KernelFamily::tabulated_radial: return profile(d);
    case KernelFamily::custom: break;
  }
  throw std::logic_error("raw_multiplier: custom kernels have no radial multiplier");
}

double KernelSpec::multiplier(double d) const {
  const double m = raw_multiplier(d);
  if (family == KernelFamily::tabulated_radial) return std::clamp(m, 1.0 / Lambda, Lambda);
  return m;
}

double KernelSpec::radial_value(double d, int Q) const {
  return std::pow(d, -(Q + alpha)) * multiplier(d);
}

double eval_kernel_coords(const KernelSpec& spec, const double* x, const double* y, int n, double d) {
  if (spec.family == KernelFamily::custom) {
    const std::size_t len = static_cast<std::size_t>(2 * n + 1);
    return spec.custom(std::span<const double>(x, len), std::span<const double>(y, len));
  }
  return spec.radial_value(d, homogeneous_degree(n));
}

double eval_kernel(const KernelSpec& spec, const GroupPoint& x, const GroupPoint& y) {
  const double d = kdist(x, y);
  if (d == 0.0) throw SingularityError("eval_kernel: x == y (kernel is singular on the diagonal)");
  const auto cx = x.coords();
  const auto cy = y.coords();
  return eval_kernel_coords(spec, cx.data(), cy.data(), x.dim(), d);
}

namespace {

GroupPoint random_point(Rng& rng, int n, double half_z, double half_s) {
  GroupPoint p = GroupPoint::neutral(n);
  for (int k = 0; k < n; ++k) {
    p.xi[k] = rng.uniform(-half_z, half_z);
    p.eta[k] = rng.uniform(-half_z, half_z);
  }
  p.s = rng.uniform(-half_s, half_s);
  return p;
}

// Group element of Koranyi norm exactly r (up to round-off).
GroupPoint random_offset(Rng& rng, int n, double r) {
  GroupPoint dir;
  double norm = 0.0;
  do {
    dir = random_point(rng, n, 1.0, 1.0);
    norm = knorm(dir);
  } while (norm < 1e-3);
  return dilate(r / norm, dir);
}

double ratio_of(const KernelSpec& spec, const GroupPoint& x, const GroupPoint& y, int Q) {
  const double d = kdist(x, y);
  if (spec.radial()) return spec.raw_multiplier(d);
  return eval_kernel(spec, x, y) * std::pow(d, Q + spec.alpha);
}

}  // namespace

ValidationReport validate_kernel(const KernelSpec& spec, const GroupContext& ctx,
                                 std::size_t sample_count, std::uint64_t seed) {
  if (sample_count < 1) throw std::invalid_argument("validate_kernel: sample_count must be >= 1");
  spec.check_parameters();
  const int n = ctx.n;
  const int Q = ctx.Q;
  Rng rng(seed);
  ValidationReport rep;

  auto record = [&](const GroupPoint& x, const GroupPoint& y) {
    const double ratio = ratio_of(spec, x, y, Q);
    rep.worst_upper_ratio = std::max(rep.worst_upper_ratio, ratio);
    rep.worst_lower_ratio = std::max(rep.worst_lower_ratio, 1.0 / ratio);
    ++rep.samples;
  };

  for (std::size_t k = 0; k < sample_count; ++k) {
    const GroupPoint x = random_point(rng, n, 2.0, 4.0);
    const double r = std::pow(10.0, rng.uniform(-2.0, 2.0));
    const GroupPoint y = random_offset(rng, n, r);
    const GroupPoint forward = mul(x, y);
    const GroupPoint backward = mul(x, inv(y));
    record(x, forward);

    const double j_fwd = eval_kernel(spec, x, forward);
    const double j_bwd = eval_kernel(spec, x, backward);
    rep.reflection_residual = std::max(rep.reflection_residual, std::abs(j_fwd - j_bwd) / j_fwd);
    const double j_swap = eval_kernel(spec, forward, x);
    rep.pair_residual = std::max(rep.pair_residual, std::abs(j_fwd - j_swap) / j_fwd);
  }

  // Piecewise-linear profiles attain their extremes at the knots.
  if (spec.family == KernelFamily::tabulated_radial) {
    for (double d : spec.profile.distance) {
      const GroupPoint x = GroupPoint::neutral(n);
      record(x, random_offset(rng, n, d));
    }
  }

  constexpr double slack = 1e-12;
  if (rep.worst_upper_ratio > spec.Lambda * (1.0 + slack)) {
    rep.failures.push_back("upper bound violated: max J d^(Q+alpha) = " +
                           std::to_string(rep.worst_upper_ratio) + " > Lambda");
  }
  if (rep.worst_lower_ratio > spec.Lambda * (1.0 + slack)) {
    rep.failures.push_back("lower bound violated: max 1/(J d^(Q+alpha)) = " +
                           std::to_string(rep.worst_lower_ratio) + " > Lambda");
  }
  // Small offsets from far-out base points lose digits in the s coordinate of
  // the group law, so exact symmetries only hold to about 1e-11 here.
  constexpr double symmetry_tol = 1e-9;
  if (rep.reflection_residual > symmetry_tol) {
    rep.failures.push_back("reflection symmetry J(x,x.y) = J(x,x.y^-1) violated");
  }
  if (rep.pair_residual > symmetry_tol) {
    rep.warnings.push_back("pair symmetry J(x,y) = J(y,x) violated; assembly symmetrizes the weights");
  }
  rep.passed = rep.failures.empty();
  return rep;
}

double radial_tail_integral(const KernelSpec& spec, const GroupContext& ctx, double R) {
  if (!spec.radial()) throw std::invalid_argument("radial_tail_integral: kernel is not radial");
  if (!(R > 0.0)) throw std::invalid_argument("radial_tail_integral: R must be > 0");
  const double a = spec.alpha;
  const double base = std::pow(R, -a) / a;
  switch (spec.family) {
    case KernelFamily::pure_power:
      return ctx.C0 * base;
    case KernelFamily::log_rough: {
      // int_{log R}^inf e^{-a t} (1 + A sin t) dt
      const double t0 = std::log(R);
      const double osc = spec.amplitude * std::pow(R, -a) * (a * std::sin(t0) + std::cos(t0)) / (1.0 + a * a);
      return ctx.C0 * (base + osc);
    }
    case KernelFamily::tabulated_radial: {
      using boost::math::quadrature::gauss_kronrod;
      auto f = [&](double r) { return std::pow(r, -1.0 - a) * spec.multiplier(r); };
      double total = 0.0;
      double lo = R;
      for (double knot : spec.profile.distance) {
        if (knot <= lo) continue;
        total += gauss_kronrod<double, 15>::integrate(f, lo, knot, 15, 1e-12);
        lo = knot;
      }
      // beyond the last knot the multiplier is constant
      total += spec.multiplier(lo) * std::pow(lo, -a) / a;
      return ctx.C0 * total;
    }
    case KernelFamily::custom:
      break;
  }
  throw std::logic_error("radial_tail_integral: unreachable");
}

}  // namespace nlfilt
