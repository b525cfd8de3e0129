#include "nlfilt/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nlfilt/hgroup.hpp"
#include "nlfilt/random.hpp"

namespace nlfilt {

double brute_force_radial_tail(const KernelSpec& kernel, double C0, double R) {
  // r = R e^t:  int_R^inf r^{-1-a} m(r) dr = R^{-a} int_0^inf e^{-a t} m(R e^t) dt
  const double a = kernel.alpha;
  const double T = 60.0 / a;
  const int n = 200000;
  const double h = T / n;
  double acc = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double t = k * h;
    const double w = (k == 0 || k == n) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
    acc += w * std::exp(-a * t) * kernel.multiplier(R * std::exp(t));
  }
  return C0 * std::pow(R, -a) * acc * h / 3.0;
}

BruteForceOperator brute_force_operator(const GridSpec& grid, const KernelSpec& kernel,
                                        const QuadratureConfig& quad) {
  if (quad.subcell_refinement != 0) throw std::invalid_argument("brute force oracle: subcell refinement unsupported");
  if (!kernel.radial()) throw std::invalid_argument("brute force oracle: radial kernels only");
  const std::size_t N = grid.node_count();
  std::vector<GroupPoint> pts;
  pts.reserve(N);
  for (std::size_t i = 0; i < N; ++i) pts.push_back(grid.node_point(i));

  const double hz = 2.0 * grid.half_extent_z / (grid.points_per_axis_z - 1);
  const double hs = 2.0 * grid.half_extent_s / (grid.points_per_axis_s - 1);
  const double rho0 = quad.inner_cutoff_factor * std::max(hz, std::sqrt(hs));
  const double far = quad.tail_radius ? *quad.tail_radius : INFINITY;
  const double cellvol = std::pow(hz, 2 * grid.n) * hs;

  BruteForceOperator out;
  out.count = N;
  out.weights.assign(N * N, 0.0);
  for (std::size_t i = 0; i < N; ++i) {
    for (std::size_t j = 0; j < N; ++j) {
      if (i == j) continue;
      const double d = knorm(mul(inv(pts[i]), pts[j]));
      if (d < rho0 || d >= far) continue;
      const double jxy = eval_kernel(kernel, pts[i], pts[j]);
      const double jyx = eval_kernel(kernel, pts[j], pts[i]);
      out.weights[i * N + j] = 0.5 * (jxy + jyx) * cellvol;
    }
  }
  out.tail.assign(N, 0.0);
  if (grid.closure == Closure::dirichlet_zero) {
    // C0 straight from its definition: the |x|^{-Q} mass of the 1 <= |x| <= 2 shell over log 2
    const double C0 = koranyi_shell_integral(grid.n, 0.0, 1.0, 2.0) / std::log(2.0);
    const double R = quad.tail_radius ? *quad.tail_radius : rho0;
    const double full = brute_force_radial_tail(kernel, C0, R);
    for (std::size_t i = 0; i < N; ++i) {
      double in_grid = 0.0;
      for (std::size_t j = 0; j < N; ++j) in_grid += out.weights[i * N + j];
      out.tail[i] = quad.tail_radius ? full : std::max(0.0, full - in_grid);
    }
  }
  return out;
}

std::vector<double> brute_force_apply(const BruteForceOperator& op, const std::vector<double>& f) {
  if (f.size() != op.count) throw std::invalid_argument("brute_force_apply: size mismatch");
  std::vector<double> out(op.count, 0.0);
  for (std::size_t i = 0; i < op.count; ++i) {
    // 1/2 sum_j w_ij [(f_i - f_j) + (f_i - f_j)]: the two reflected samples coincide on the lattice pair
    double acc = 0.0;
    for (std::size_t j = 0; j < op.count; ++j) {
      const double w = op.weights[i * op.count + j];
      if (w == 0.0) continue;
      acc += 0.5 * w * (2.0 * f[i] - f[j] - f[j]);
    }
    out[i] = acc + op.tail[i] * f[i];
  }
  return out;
}

OracleComparison compare_with_oracle(const GridSpec& grid, const KernelSpec& kernel, const QuadratureConfig& quad,
                                     int fields, std::uint64_t seed) {
  const NonlocalOperator op = assemble(grid, kernel, quad);
  const BruteForceOperator ref = brute_force_operator(grid, kernel, quad);
  const std::size_t N = ref.count;
  OracleComparison cmp;
  cmp.symmetric = true;
  double wmax = 0.0, wdiff = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    for (std::size_t j = 0; j < N; ++j) {
      const double w = op.weight(i, j);
      wmax = std::max(wmax, std::abs(ref.weights[i * N + j]));
      wdiff = std::max(wdiff, std::abs(w - ref.weights[i * N + j]));
      if (w != op.weight(j, i)) cmp.symmetric = false;
    }
  }
  cmp.max_weight_rel = wmax > 0.0 ? wdiff / wmax : wdiff;
  double tmax = 0.0, tdiff = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    tmax = std::max(tmax, std::abs(ref.tail[i]));
    tdiff = std::max(tdiff, std::abs(op.tail_coefficient()[i] - ref.tail[i]));
  }
  cmp.max_tail_rel = tmax > 0.0 ? tdiff / tmax : tdiff;

  Rng rng(seed);
  std::vector<double> f(N), Lf(N);
  for (int k = 0; k < fields; ++k) {
    for (auto& v : f) v = rng.uniform(-1.0, 1.0);
    op.apply(f, Lf);
    const auto ref_Lf = brute_force_apply(ref, f);
    double m = 0.0, diff = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      m = std::max(m, std::abs(ref_Lf[i]));
      diff = std::max(diff, std::abs(Lf[i] - ref_Lf[i]));
    }
    cmp.max_apply_rel = std::max(cmp.max_apply_rel, m > 0.0 ? diff / m : diff);
  }
  return cmp;
}

}  // namespace nlfilt
