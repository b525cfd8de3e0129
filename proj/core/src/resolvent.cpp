#include "nlfilt/resolvent.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace nlfilt {

namespace {

using Vec = std::vector<double>;

double signed_pow(double x, double q) {
  if (x == 0.0) return 0.0;
  return x > 0.0 ? std::pow(x, q) : -std::pow(-x, q);
}

double dot(const Vec& a, const Vec& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double norm_inf(const Vec& a) {
  double acc = 0.0;
  for (double v : a) acc = std::max(acc, std::abs(v));
  return acc;
}

void require_finite(const Vec& a, const char* what) {
  for (double v : a) {
    if (!std::isfinite(v)) throw NumericalFailure(std::string("resolvent: non-finite ") + what);
  }
}

// Preconditioned CG for an SPD operator given as a callable.
template <typename ApplyA>
int pcg(const ApplyA& apply_a, const Vec& diag, const Vec& b, Vec& x, double rel_tol, int max_iter) {
  const std::size_t N = b.size();
  x.assign(N, 0.0);
  Vec r = b, z(N), p(N), Ap(N);
  const double bnorm = std::sqrt(dot(b, b));
  if (bnorm == 0.0) return 0;
  for (std::size_t i = 0; i < N; ++i) z[i] = r[i] / diag[i];
  p = z;
  double rz = dot(r, z);
  int it = 0;
  while (it < max_iter) {
    apply_a(p, Ap);
    const double pAp = dot(p, Ap);
    if (!(pAp > 0.0)) break;
    const double a = rz / pAp;
    for (std::size_t i = 0; i < N; ++i) {
      x[i] += a * p[i];
      r[i] -= a * Ap[i];
    }
    ++it;
    if (std::sqrt(dot(r, r)) <= rel_tol * bnorm) break;
    for (std::size_t i = 0; i < N; ++i) z[i] = r[i] / diag[i];
    const double rz_next = dot(r, z);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t i = 0; i < N; ++i) p[i] = z[i] + beta * p[i];
  }
  return it;
}

// Newton state. For m >= 1 the unknown is u = v^{1/m} (v = |u|^{m-1}u is
// smooth in u); for m < 1 the unknown is v itself (u = v^{1/m} is smooth).
class Newton {
 public:
  explicit Newton(const ResolventProblem& prob)
      : prob_(prob), N_(prob.g.size()), use_u_(prob.m >= 1.0), Lw_(N_), w_(N_), u_(N_) {}

  // Sets the working variable from v and refreshes u, w and the residual.
  void set_from_v(const Vec& v) {
    x_.resize(N_);
    if (use_u_) {
      for (std::size_t i = 0; i < N_; ++i) x_[i] = signed_pow(v[i], 1.0 / prob_.m);
    } else {
      x_ = v;
    }
    refresh(x_, w_, u_, Lw_, res_);
  }

  void init() {
    Vec v0(N_);
    for (std::size_t i = 0; i < N_; ++i) v0[i] = signed_pow(prob_.g[i], prob_.m);
    set_from_v(v0);
  }

  // Residual R = u + eps L w - g for the given working variable.
  void refresh(const Vec& x, Vec& w, Vec& u, Vec& Lw, Vec& res) const {
    if (use_u_) {
      u = x;
      for (std::size_t i = 0; i < N_; ++i) w[i] = signed_pow(x[i], prob_.m);
    } else {
      w = x;
      for (std::size_t i = 0; i < N_; ++i) u[i] = signed_pow(x[i], 1.0 / prob_.m);
    }
    prob_.op.apply(w, Lw, prob_.epsilon);
    res.resize(N_);
    for (std::size_t i = 0; i < N_; ++i) res[i] = u[i] + Lw[i] - prob_.g[i];
    require_finite(res, "residual");
  }

  double residual_inf() const { return norm_inf(res_); }
  const Vec& w() const { return w_; }

  // Returns false when the line search could not reduce the merit function.
  bool newton_step(int& linear_iters) {
    const auto& op = prob_.op;
    const double eps = prob_.epsilon;
    Vec dir(N_);
    Vec diag(N_);
    const double rn = residual_inf();
    const double forcing = std::clamp(rn, 1e-14, 1e-2);
    const int max_cg = static_cast<int>(std::min<std::size_t>(N_ + 10, 2000));
    if (use_u_) {
      Vec S(N_);
      for (std::size_t i = 0; i < N_; ++i) {
        S[i] = std::sqrt(prob_.m * std::pow(std::abs(u_[i]), prob_.m - 1.0));
        if (prob_.m == 1.0) S[i] = 1.0;
        diag[i] = 1.0 + eps * S[i] * S[i] * op.diagonal(i);
      }
      Vec rhs(N_), q, tmp(N_), Ltmp(N_);
      for (std::size_t i = 0; i < N_; ++i) rhs[i] = -S[i] * res_[i];
      auto apply_a = [&](const Vec& p, Vec& out) {
        for (std::size_t i = 0; i < N_; ++i) tmp[i] = S[i] * p[i];
        op.apply(tmp, Ltmp, eps);
        out.resize(N_);
        for (std::size_t i = 0; i < N_; ++i) out[i] = p[i] + S[i] * Ltmp[i];
      };
      linear_iters += pcg(apply_a, diag, rhs, q, forcing, max_cg);
      for (std::size_t i = 0; i < N_; ++i) tmp[i] = S[i] * q[i];
      op.apply(tmp, Ltmp, eps);
      for (std::size_t i = 0; i < N_; ++i) dir[i] = -res_[i] - Ltmp[i];
    } else {
      Vec D(N_);
      for (std::size_t i = 0; i < N_; ++i) {
        D[i] = std::pow(std::abs(w_[i]), 1.0 / prob_.m - 1.0) / prob_.m;
        diag[i] = D[i] + eps * op.diagonal(i);
        if (!(diag[i] > 0.0)) diag[i] = 1.0;
      }
      Vec rhs(N_), Lp(N_);
      for (std::size_t i = 0; i < N_; ++i) rhs[i] = -res_[i];
      auto apply_a = [&](const Vec& p, Vec& out) {
        op.apply(p, Lp, eps);
        out.resize(N_);
        for (std::size_t i = 0; i < N_; ++i) out[i] = D[i] * p[i] + Lp[i];
      };
      linear_iters += pcg(apply_a, diag, rhs, dir, forcing, max_cg);
    }
    require_finite(dir, "Newton direction");

    const double merit0 = 0.5 * dot(res_, res_);
    Vec x(N_), w(N_), u(N_), Lw(N_), res(N_);
    double t = 1.0;
    for (int k = 0; k < 40; ++k, t *= 0.5) {
      for (std::size_t i = 0; i < N_; ++i) x[i] = x_[i] + t * dir[i];
      refresh(x, w, u, Lw, res);
      const double merit = 0.5 * dot(res, res);
      if (merit <= (1.0 - 1e-4 * t) * merit0 || norm_inf(res) <= 0.0) {
        x_.swap(x);
        w_.swap(w);
        u_.swap(u);
        Lw_.swap(Lw);
        res_.swap(res);
        return true;
      }
    }
    return false;
  }

  // One backtracking step of diagonally preconditioned descent on F,
  // performed in the v variable.
  bool descent_step() {
    const auto& op = prob_.op;
    const double eps = prob_.epsilon;
    const double cv = op.cell_volume();
    const double inv_m = 1.0 / prob_.m;
    Vec dir(N_);
    for (std::size_t i = 0; i < N_; ++i) {
      const double a = std::abs(w_[i]);
      double curv = a > 0.0 ? inv_m * std::pow(a, inv_m - 1.0) : 0.0;
      // the potential's curvature blows up at v = 0 when m > 1; cap it
      curv = std::min(curv, 1e8);
      double p = curv + eps * op.diagonal(i);
      if (!(p > 0.0)) p = 1.0;
      dir[i] = -res_[i] / p;
    }
    auto F = [&](const Vec& w, const Vec& Lw) {
      double acc = 0.0;
      for (std::size_t i = 0; i < N_; ++i) {
        acc += 0.5 * w[i] * Lw[i] + prob_.m / (prob_.m + 1.0) * std::pow(std::abs(w[i]), inv_m + 1.0) -
               w[i] * prob_.g[i];
      }
      return acc * cv;
    };
    const double f0 = F(w_, Lw_);
    const double slope = cv * dot(res_, dir);
    if (!(slope < 0.0)) return false;
    Vec wt(N_), x(N_), w(N_), u(N_), Lw(N_), res(N_);
    double t = 1.0;
    for (int k = 0; k < 60; ++k, t *= 0.5) {
      for (std::size_t i = 0; i < N_; ++i) wt[i] = w_[i] + t * dir[i];
      if (use_u_) {
        for (std::size_t i = 0; i < N_; ++i) x[i] = signed_pow(wt[i], inv_m);
      } else {
        x = wt;
      }
      refresh(x, w, u, Lw, res);
      if (F(w, Lw) <= f0 + 1e-4 * t * slope) {
        x_.swap(x);
        w_.swap(w);
        u_.swap(u);
        Lw_.swap(Lw);
        res_.swap(res);
        return true;
      }
    }
    return false;
  }

 private:
  const ResolventProblem& prob_;
  std::size_t N_;
  bool use_u_;
  Vec x_, Lw_, w_, u_, res_;
};

}  // namespace

void ResolventProblem::validate() const {
  if (!(m > 0.0)) throw std::invalid_argument("resolvent: m must be > 0");
  if (!(epsilon > 0.0)) throw std::invalid_argument("resolvent: epsilon must be > 0");
  if (!(tol > 0.0)) throw std::invalid_argument("resolvent: tol must be > 0");
  if (max_iters < 1) throw std::invalid_argument("resolvent: max_iters must be >= 1");
  if (!(g.grid == op.grid()) || g.size() != op.size()) {
    throw std::invalid_argument("resolvent: g does not live on the operator grid");
  }
}

double functional(const ResolventProblem& prob, const DiscreteField& v) {
  if (!(v.grid == prob.op.grid())) throw std::invalid_argument("functional: grid mismatch");
  const std::size_t N = v.size();
  Vec Lv(N);
  prob.op.apply(v.values, Lv);
  const double q = 1.0 / prob.m + 1.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    acc += 0.5 * prob.epsilon * v[i] * Lv[i] + prob.m / (prob.m + 1.0) * std::pow(std::abs(v[i]), q) -
           v[i] * prob.g[i];
  }
  return acc * prob.op.cell_volume();
}

DiscreteField gradient(const ResolventProblem& prob, const DiscreteField& v) {
  if (!(v.grid == prob.op.grid())) throw std::invalid_argument("gradient: grid mismatch");
  DiscreteField r(v.grid);
  prob.op.apply(v.values, r.values, prob.epsilon);
  for (std::size_t i = 0; i < v.size(); ++i) r[i] += signed_pow(v[i], 1.0 / prob.m) - prob.g[i];
  return r;
}

std::pair<DiscreteField, SolverReport> solve(const ResolventProblem& prob) {
  prob.validate();
  require_finite(prob.g.values, "data g");
  SolverReport rep;
  Newton state(prob);
  state.init();

  bool use_descent = prob.method == ResolventMethod::descent;
  int stalled = 0;
  while (rep.iterations < prob.max_iters) {
    if (state.residual_inf() <= prob.tol) break;
    ++rep.iterations;
    bool moved = false;
    if (!use_descent) {
      moved = state.newton_step(rep.linear_iterations);
      if (!moved) {
        moved = state.descent_step();
        ++rep.descent_steps;
      }
    } else {
      moved = state.descent_step();
      ++rep.descent_steps;
    }
    stalled = moved ? 0 : stalled + 1;
    if (stalled >= 3) break;
  }

  DiscreteField v(prob.g.grid, state.w());
  const DiscreteField r = gradient(prob, v);
  rep.final_residual_inf = lp_norm(r, INFINITY);
  rep.functional_value = functional(prob, v);
  rep.converged = rep.final_residual_inf <= prob.tol;
  return {std::move(v), rep};
}

ContractionCheck t_contraction_check(const NonlocalOperator& op, const DiscreteField& g1,
                                     const DiscreteField& g2, double m, double epsilon, double tol) {
  require_same_grid(g1, g2, "t_contraction_check");
  ResolventProblem p1{op, g1, m, epsilon, tol};
  ResolventProblem p2{op, g2, m, epsilon, tol};
  auto [v1, r1] = solve(p1);
  auto [v2, r2] = solve(p2);
  ContractionCheck out;
  out.report1 = r1;
  out.report2 = r2;
  const double cv = op.cell_volume();
  out.ordered_data = true;
  for (std::size_t i = 0; i < g1.size(); ++i) {
    const double a = signed_pow(v1[i], 1.0 / m);
    const double b = signed_pow(v2[i], 1.0 / m);
    out.lhs += std::max(0.0, a - b) * cv;
    out.rhs += std::max(0.0, g1[i] - g2[i]) * cv;
    if (g1[i] < g2[i]) out.ordered_data = false;
  }
  if (out.ordered_data) {
    for (std::size_t i = 0; i < g1.size(); ++i) {
      out.order_violation = std::max(out.order_violation, v2[i] - v1[i]);
    }
  }
  out.margin = out.rhs + tol - out.lhs;
  out.holds = out.margin >= 0.0;
  return out;
}

}  // namespace nlfilt
