#include "nlfilt/holder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace nlfilt {

namespace {

std::vector<GroupPoint> unit_ball_pattern(int n, double spacing) {
  const int dims = 2 * n + 1;
  const int per_axis = static_cast<int>(std::floor(1.0 / spacing + 1e-9));
  const int side = 2 * per_axis + 1;
  std::size_t total = 1;
  for (int k = 0; k < dims; ++k) total *= static_cast<std::size_t>(side);
  std::vector<GroupPoint> out;
  std::vector<double> c(static_cast<std::size_t>(dims));
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rem = idx;
    for (int k = dims - 1; k >= 0; --k) {
      c[static_cast<std::size_t>(k)] = (static_cast<int>(rem % side) - per_axis) * spacing;
      rem /= side;
    }
    GroupPoint p = GroupPoint::from_coords(c);
    if (knorm(p) <= 1.0 + 1e-12) out.push_back(std::move(p));
  }
  return out;
}

// Stored fields whose times bracket t, with the linear weight on the later one.
bool bracket(const Trajectory& traj, double t, std::size_t& lo, std::size_t& hi, double& w) {
  const auto& steps = traj.field_steps;
  if (steps.empty()) return false;
  const double tol = 1e-12 * std::max(1.0, std::abs(t));
  for (std::size_t k = 0; k < steps.size(); ++k) {
    const double tk = traj.times[steps[k]];
    if (std::abs(tk - t) <= tol) {
      lo = hi = k;
      w = 0.0;
      return true;
    }
    if (tk > t) {
      if (k == 0) return false;
      lo = k - 1;
      hi = k;
      const double ta = traj.times[steps[lo]];
      w = (t - ta) / (tk - ta);
      return true;
    }
  }
  return false;
}

}  // namespace

bool cylinder_half_oscillation(const Trajectory& traj, const CylinderSpec& cyl, double pattern_spacing,
                               double& omega) {
  const int n = traj.grid.n;
  if (cyl.center.dim() != n) throw std::invalid_argument("cylinder: center dimension mismatch");
  const double t_lo = cyl.t0 - cyl.depth;
  if (t_lo < -1e-12) return false;

  // sample times: every stored field inside the window plus both ends
  std::vector<double> times{std::max(0.0, t_lo), cyl.t0};
  for (std::size_t s : traj.field_steps) {
    const double t = traj.times[s];
    if (t > t_lo && t < cyl.t0) times.push_back(t);
  }
  std::sort(times.begin(), times.end());

  const auto pattern = unit_ball_pattern(n, pattern_spacing);
  std::vector<std::vector<double>> coords;
  coords.reserve(pattern.size());
  for (const auto& p : pattern) coords.push_back(mul(cyl.center, dilate(cyl.radius, p)).coords());

  double hi_v = -std::numeric_limits<double>::infinity();
  double lo_v = std::numeric_limits<double>::infinity();
  for (double t : times) {
    std::size_t a = 0, b = 0;
    double w = 0.0;
    if (!bracket(traj, t, a, b, w)) return false;
    for (const auto& c : coords) {
      double va = 0.0, vb = 0.0;
      if (!interpolate(traj.fields[a], c.data(), va)) return false;
      if (!interpolate(traj.fields[b], c.data(), vb)) return false;
      const double v = (1.0 - w) * va + w * vb;
      hi_v = std::max(hi_v, v);
      lo_v = std::min(lo_v, v);
    }
  }
  omega = 0.5 * (hi_v - lo_v);
  return true;
}

HolderReport holder_diagnostic(const Trajectory& traj, const GroupPoint& center, double t0,
                               const HolderOptions& opt) {
  if (!(opt.R > 1.0)) throw std::invalid_argument("holder_diagnostic: R must be > 1");
  if (opt.depth < 1) throw std::invalid_argument("holder_diagnostic: depth must be >= 1");
  HolderReport out;
  CheckReport& r = out.report;
  r.name = opt.degenerate ? "holder_degenerate" : "holder";
  const double alpha = traj.alpha;
  const double sigma = 1.0 - 1.0 / traj.m;
  const double tau = opt.tau ? *opt.tau : std::pow(opt.r_base, alpha);
  r.inputs = {{"m", traj.m},         {"alpha", alpha},     {"R", opt.R},
              {"depth", opt.depth},  {"r_base", opt.r_base}, {"tau", tau},
              {"t0", t0},            {"center", center.coords()},
              {"degenerate", opt.degenerate}, {"points_per_axis_z", traj.grid.points_per_axis_z}};
  r.tolerances["resolution_floor"] = opt.floor;
  if (opt.degenerate) r.inputs["sigma"] = sigma;

  for (int k = 0; k <= opt.depth; ++k) {
    CylinderSpec cyl;
    cyl.center = center;
    cyl.t0 = t0;
    cyl.radius = opt.r_base * std::pow(opt.R, -k);
    cyl.depth = tau * std::pow(opt.R, -k * alpha);
    if (opt.degenerate && traj.m > 1.0 && k > 0 && out.omega.front() > 0.0) {
      const double rel = std::max(out.omega.back() / out.omega.front(), 1e-12);
      cyl.depth *= std::pow(rel, -sigma);
      // keep the family nested when the oscillation drops faster than R^{-alpha/sigma}
      cyl.depth = std::min(cyl.depth, out.cylinders.back().depth);
      if (cyl.depth > t0) {
        std::ostringstream w;
        w << "level " << k << ": degenerate time depth " << cyl.depth << " clipped to " << t0;
        r.notes.push_back(w.str());
        cyl.depth = t0;
      }
    }
    double omega = 0.0;
    if (!cylinder_half_oscillation(traj, cyl, opt.pattern_spacing, omega)) {
      std::ostringstream w;
      w << "cylinder at level " << k << " leaves the computed domain; depth truncated to " << k - 1;
      r.notes.push_back(w.str());
      break;
    }
    out.cylinders.push_back(cyl);
    out.omega.push_back(omega);
    if (omega < opt.floor) {
      r.notes.push_back("oscillation below the resolution floor at level " + std::to_string(k));
      break;
    }
  }
  out.levels_used = static_cast<int>(out.omega.size());
  r.measured["omega"] = out.omega;

  bool all_flat = !out.omega.empty();
  for (double w : out.omega) {
    if (w >= opt.floor) all_flat = false;
  }
  if (all_flat) {
    out.flat = true;
    r.measured["flat"] = true;
    r.status = "inconclusive";
    r.notes.push_back("flat: oscillation vanishes, exponent undefined");
    return out;
  }
  std::size_t usable = out.omega.size();
  while (usable > 0 && out.omega[usable - 1] < opt.floor) --usable;
  if (usable < 2) {
    r.status = "inconclusive";
    r.notes.push_back("fewer than two resolved levels");
    return out;
  }
  double worst = 0.0;
  for (std::size_t k = 0; k + 1 < usable; ++k) {
    const double ratio = out.omega[k + 1] / out.omega[k];
    out.ratios.push_back(ratio);
    worst = std::max(worst, ratio);
  }
  out.theta_hat = 1.0 - worst;
  out.beta_hat = -std::log(out.omega[usable - 1] / out.omega[0]) / (static_cast<double>(usable - 1) * std::log(opt.R));
  r.measured["ratios"] = out.ratios;
  r.measured["theta_hat"] = out.theta_hat;
  r.measured["beta_hat"] = out.beta_hat;
  r.set_pass(out.theta_hat > 0.0);
  return out;
}

}  // namespace nlfilt
