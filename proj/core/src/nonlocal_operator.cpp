#include "nlfilt/nonlocal_operator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "nlfilt/parallel.hpp"
#include "nlfilt/random.hpp"

namespace nlfilt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Points uniformly distributed in the unit Koranyi ball; their directions
// follow the polar surface measure.
std::vector<double> sample_unit_ball(Rng& rng, int n, std::size_t count) {
  const int dims = 2 * n + 1;
  std::vector<double> pts;
  pts.reserve(count * static_cast<std::size_t>(dims));
  std::vector<double> c(static_cast<std::size_t>(dims));
  const std::vector<double> origin(static_cast<std::size_t>(dims), 0.0);
  while (pts.size() < count * static_cast<std::size_t>(dims)) {
    for (auto& v : c) v = rng.uniform(-1.0, 1.0);
    const double r = detail::koranyi_distance(origin.data(), c.data(), n);
    if (r > 1.0 || r < 1e-6) continue;
    pts.insert(pts.end(), c.begin(), c.end());
  }
  return pts;
}

// Monte Carlo estimate of int_{d(x,y) >= R} J(x, y) dy with radii drawn from
// the pure-power tail density r^{-1-alpha} on [R, inf).
double monte_carlo_tail(const KernelSpec& kernel, const GroupContext& ctx, const double* x,
                        double R, std::size_t samples, std::uint64_t seed) {
  const int n = ctx.n;
  const int dims = 2 * n + 1;
  Rng rng(seed);
  const auto dirs = sample_unit_ball(rng, n, samples);
  const std::vector<double> origin(static_cast<std::size_t>(dims), 0.0);
  std::vector<double> offset(static_cast<std::size_t>(dims));
  std::vector<double> y(static_cast<std::size_t>(dims));
  double acc = 0.0;
  for (std::size_t k = 0; k < samples; ++k) {
    const double* d = dirs.data() + k * static_cast<std::size_t>(dims);
    const double norm = detail::koranyi_distance(origin.data(), d, n);
    double u = rng.uniform();
    if (u <= 0.0) u = 0x1.0p-53;
    const double r = R * std::pow(u, -1.0 / kernel.alpha);
    const double scale = r / norm;
    for (int q = 0; q < 2 * n; ++q) offset[q] = d[q] * scale;
    offset[2 * n] = d[2 * n] * scale * scale;
    // y = x . offset
    double twist = 0.0;
    for (int q = 0; q < n; ++q) {
      y[q] = x[q] + offset[q];
      y[n + q] = x[n + q] + offset[n + q];
      twist += x[n + q] * offset[q] - x[q] * offset[n + q];
    }
    y[2 * n] = x[2 * n] + offset[2 * n] + 2.0 * twist;
    const double dist = detail::koranyi_distance(x, y.data(), n);
    acc += eval_kernel_coords(kernel, x, y.data(), n, dist) * std::pow(dist, ctx.Q + kernel.alpha);
  }
  return ctx.C0 * std::pow(R, -kernel.alpha) / kernel.alpha * acc / static_cast<double>(samples);
}

}  // namespace

void QuadratureConfig::validate() const {
  if (!(inner_cutoff_factor >= 1.0)) throw std::invalid_argument("quad: inner_cutoff_factor must be >= 1");
  if (tail_radius && !(*tail_radius > 0.0)) throw std::invalid_argument("quad: tail_radius must be > 0");
  if (subcell_refinement < 0) throw std::invalid_argument("quad: subcell_refinement must be >= 0");
  if (tail_samples < 1) throw std::invalid_argument("quad: tail_samples must be >= 1");
}

double inner_cutoff(const GridSpec& grid, const QuadratureConfig& quad) {
  return quad.inner_cutoff_factor * std::max(grid.h_z(), std::sqrt(grid.h_s()));
}

double NonlocalOperator::compute_weight(std::size_t i, std::size_t j) const {
  if (i == j) return 0.0;
  const int n = grid_.n;
  const double* xi = coords_.data() + i * static_cast<std::size_t>(stride_);
  const double* xj = coords_.data() + j * static_cast<std::size_t>(stride_);
  const double d = detail::koranyi_distance(xi, xj, n);
  if (d < rho0_ || d >= far_) return 0.0;

  if (!sub_offsets_.empty() && d < 3.0 * rho0_) {
    // cell averages of J around each endpoint
    const std::size_t subs = sub_offsets_.size() / static_cast<std::size_t>(stride_);
    std::vector<double> y(static_cast<std::size_t>(stride_));
    auto cell_average = [&](const double* from, const double* to) {
      double acc = 0.0;
      for (std::size_t k = 0; k < subs; ++k) {
        const double* o = sub_offsets_.data() + k * static_cast<std::size_t>(stride_);
        for (int q = 0; q < stride_; ++q) y[q] = to[q] + o[q];
        const double dd = detail::koranyi_distance(from, y.data(), n);
        if (dd >= rho0_) acc += eval_kernel_coords(kernel_, from, y.data(), n, dd);
      }
      return acc / static_cast<double>(subs);
    };
    return 0.5 * (cell_average(xi, xj) + cell_average(xj, xi)) * cellvol_;
  }

  if (kernel_.radial()) return kernel_.radial_value(d, ctx_.Q) * cellvol_;
  return 0.5 * (eval_kernel_coords(kernel_, xi, xj, n, d) + eval_kernel_coords(kernel_, xj, xi, n, d)) * cellvol_;
}

double NonlocalOperator::weight(std::size_t i, std::size_t j) const {
  if (i >= count_ || j >= count_) throw std::out_of_range("NonlocalOperator::weight: index out of range");
  if (dense()) return weights_[i * count_ + j];
  return compute_weight(i, j);
}

void NonlocalOperator::apply_rows(std::span<const double> f, std::span<double> out, double scale,
                                  std::size_t lo, std::size_t hi) const {
  const std::size_t N = count_;
  std::vector<double> row;
  if (!dense()) row.resize(N);
  for (std::size_t i = lo; i < hi; ++i) {
    const double* w = nullptr;
    if (dense()) {
      w = weights_.data() + i * N;
    } else {
      for (std::size_t j = 0; j < N; ++j) row[j] = compute_weight(i, j);
      w = row.data();
    }
    const double fi = f[i];
    // four interleaved partial sums in a fixed order
    double a0 = 0.0, a1 = 0.0, a2 = 0.0, a3 = 0.0;
    std::size_t j = 0;
    for (; j + 4 <= N; j += 4) {
      a0 += w[j] * (fi - f[j]);
      a1 += w[j + 1] * (fi - f[j + 1]);
      a2 += w[j + 2] * (fi - f[j + 2]);
      a3 += w[j + 3] * (fi - f[j + 3]);
    }
    for (; j < N; ++j) a0 += w[j] * (fi - f[j]);
    out[i] = scale * (((a0 + a1) + (a2 + a3)) + tail_[i] * fi);
  }
}

void NonlocalOperator::apply(std::span<const double> f, std::span<double> out, double scale) const {
  if (f.size() != count_ || out.size() != count_) {
    throw std::invalid_argument("NonlocalOperator::apply: size mismatch");
  }
  parallel_for(count_, [&](std::size_t lo, std::size_t hi) { apply_rows(f, out, scale, lo, hi); });
}

double NonlocalOperator::effective_exterior_radius(std::size_t i) const {
  const double t = tail_.at(i);
  if (!(t > 0.0)) return kInf;
  return std::pow(kernel_.alpha * t / ctx_.C0, -1.0 / kernel_.alpha);
}

NonlocalOperator assemble(const GridSpec& grid, const KernelSpec& kernel, const QuadratureConfig& quad) {
  grid.validate();
  kernel.check_parameters();
  quad.validate();

  NonlocalOperator op;
  op.grid_ = grid;
  op.kernel_ = kernel;
  op.ctx_ = make_group_context(grid.n);
  op.quad_ = quad;
  op.count_ = grid.node_count();
  op.stride_ = grid.coords_per_node();
  op.rho0_ = inner_cutoff(grid, quad);
  op.far_ = quad.tail_radius ? *quad.tail_radius : kInf;
  if (!(op.far_ > op.rho0_)) {
    throw std::invalid_argument("assemble: tail_radius must exceed the inner cutoff rho0");
  }
  op.cellvol_ = grid.cell_volume();
  op.coords_ = grid.all_coords();

  if (quad.subcell_refinement > 0) {
    const int r = quad.subcell_refinement + 1;
    const int dims = op.stride_;
    std::size_t subs = 1;
    for (int k = 0; k < dims; ++k) subs *= static_cast<std::size_t>(r);
    op.sub_offsets_.resize(subs * static_cast<std::size_t>(dims));
    for (std::size_t s = 0; s < subs; ++s) {
      std::size_t rem = s;
      for (int k = dims - 1; k >= 0; --k) {
        const double h = k == 2 * grid.n ? grid.h_s() : grid.h_z();
        const auto idx = static_cast<double>(rem % static_cast<std::size_t>(r));
        rem /= static_cast<std::size_t>(r);
        op.sub_offsets_[s * static_cast<std::size_t>(dims) + static_cast<std::size_t>(k)] =
            ((idx + 0.5) / r - 0.5) * h;
      }
    }
  }

  const std::size_t N = op.count_;
  op.row_sum_.assign(N, 0.0);
  op.tail_.assign(N, 0.0);

  if (N <= quad.dense_threshold) {
    op.weights_.assign(N * N, 0.0);
    parallel_for(N, [&](std::size_t lo, std::size_t hi) {
      for (std::size_t i = lo; i < hi; ++i) {
        for (std::size_t j = i + 1; j < N; ++j) op.weights_[i * N + j] = op.compute_weight(i, j);
      }
    });
    for (std::size_t i = 0; i < N; ++i) {
      for (std::size_t j = 0; j < i; ++j) op.weights_[i * N + j] = op.weights_[j * N + i];
    }
    parallel_for(N, [&](std::size_t lo, std::size_t hi) {
      for (std::size_t i = lo; i < hi; ++i) {
        double acc = 0.0;
        const double* w = op.weights_.data() + i * N;
        for (std::size_t j = 0; j < N; ++j) acc += w[j];
        op.row_sum_[i] = acc;
      }
    });
  } else {
    parallel_for(N, [&](std::size_t lo, std::size_t hi) {
      for (std::size_t i = lo; i < hi; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < N; ++j) acc += op.compute_weight(i, j);
        op.row_sum_[i] = acc;
      }
    });
  }

  if (grid.closure == Closure::dirichlet_zero) {
    const double R = quad.tail_radius ? *quad.tail_radius : op.rho0_;
    double radial_tail = 0.0;
    if (kernel.radial()) radial_tail = radial_tail_integral(kernel, op.ctx_, R);
    for (std::size_t i = 0; i < N; ++i) {
      const double* xi = op.coords_.data() + i * static_cast<std::size_t>(op.stride_);
      const double full = kernel.radial()
                              ? radial_tail
                              : monte_carlo_tail(kernel, op.ctx_, xi, R, quad.tail_samples, quad.seed + i);
      // auto: everything beyond rho0 minus what the lattice already covers
      op.tail_[i] = quad.tail_radius ? full : std::max(0.0, full - op.row_sum_[i]);
    }
  }
  return op;
}

NonlocalOperator operator_from_weights(const GridSpec& grid, std::vector<double> weights,
                                       std::vector<double> tail) {
  grid.validate();
  const std::size_t N = grid.node_count();
  if (weights.size() != N * N || tail.size() != N) {
    throw std::invalid_argument("operator_from_weights: sizes do not match the grid");
  }
  for (std::size_t i = 0; i < N; ++i) {
    if (weights[i * N + i] != 0.0) throw std::invalid_argument("operator_from_weights: nonzero diagonal");
    if (!(tail[i] >= 0.0)) throw std::invalid_argument("operator_from_weights: negative tail");
    for (std::size_t j = 0; j < N; ++j) {
      const double w = weights[i * N + j];
      if (!(w >= 0.0) || w != weights[j * N + i]) {
        throw std::invalid_argument("operator_from_weights: weights must be symmetric and nonnegative");
      }
    }
  }
  NonlocalOperator op;
  op.grid_ = grid;
  op.ctx_ = make_group_context(grid.n);
  op.count_ = N;
  op.stride_ = grid.coords_per_node();
  op.rho0_ = inner_cutoff(grid, op.quad_);
  op.far_ = kInf;
  op.cellvol_ = grid.cell_volume();
  op.coords_ = grid.all_coords();
  op.weights_ = std::move(weights);
  op.tail_ = std::move(tail);
  op.row_sum_.assign(N, 0.0);
  for (std::size_t i = 0; i < N; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < N; ++j) acc += op.weights_[i * N + j];
    op.row_sum_[i] = acc;
  }
  return op;
}

DiscreteField apply(const NonlocalOperator& op, const DiscreteField& f) {
  if (!(f.grid == op.grid())) throw std::invalid_argument("apply: grid mismatch");
  DiscreteField out(f.grid);
  op.apply(f.values, out.values);
  return out;
}

double dirichlet_form(const NonlocalOperator& op, const DiscreteField& f, const DiscreteField& g) {
  if (!(f.grid == op.grid()) || !(g.grid == op.grid())) {
    throw std::invalid_argument("dirichlet_form: grid mismatch");
  }
  const std::size_t N = op.size();
  std::vector<double> partial(N, 0.0);
  parallel_for(N, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      double acc = 0.0;
      const double fi = f.values[i];
      const double gi = g.values[i];
      for (std::size_t j = i + 1; j < N; ++j) {
        acc += op.weight(i, j) * (fi - f.values[j]) * (gi - g.values[j]);
      }
      partial[i] = acc + op.tail_coefficient()[i] * fi * gi;
    }
  });
  double total = 0.0;
  for (double v : partial) total += v;
  return total * op.cell_volume();
}

double annulus_integral(const GroupContext& ctx, double exponent, double a, double b) {
  if (!(a > 0.0) || !(a < b)) throw std::invalid_argument("annulus_integral: need 0 < a < b");
  return koranyi_shell_integral(ctx.n, exponent, a, b);
}

}  // namespace nlfilt
