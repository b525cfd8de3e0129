#include "nlfilt/checks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "nlfilt/oracle.hpp"
#include "nlfilt/random.hpp"
#include "nlfilt/resolvent.hpp"

namespace nlfilt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::size_t p_index(const Trajectory& traj, double p) {
  for (std::size_t k = 0; k < traj.p_list.size(); ++k) {
    if (traj.p_list[k] == p) return k;
  }
  std::ostringstream msg;
  msg << "trajectory does not record the L^" << p << " norm";
  throw std::invalid_argument(msg.str());
}

json run_inputs(const Trajectory& traj) {
  return json{{"m", traj.m},
              {"alpha", traj.alpha},
              {"Q", traj.Q},
              {"n", traj.grid.n},
              {"points_per_axis_z", traj.grid.points_per_axis_z},
              {"points_per_axis_s", traj.grid.points_per_axis_s},
              {"closure", to_string(traj.grid.closure)},
              {"steps", traj.steps()},
              {"horizon", traj.times.empty() ? 0.0 : traj.times.back()}};
}

double positive_part_l1(const DiscreteField& a, const DiscreteField& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::max(0.0, a[i] - b[i]);
  return acc * a.grid.cell_volume();
}

double l1_distance(const DiscreteField& a, const DiscreteField& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::abs(a[i] - b[i]);
  return acc * a.grid.cell_volume();
}

}  // namespace

double smoothing_gamma(double m, double alpha, int Q, double p) { return 1.0 / (m - 1.0 + alpha * p / Q); }

double smoothing_delta(double m, double alpha, int Q, double p) {
  return alpha * p * smoothing_gamma(m, alpha, Q, p) / Q;
}

double mass_leak_slope(double m, double alpha, int Q) {
  const double p = std::max(1.0, 1.0 / m);
  return -alpha + Q * (p - 1.0) / p;
}

CheckReport check_mass(const Trajectory& traj, Closure closure, double tol) {
  CheckReport r;
  r.name = "mass_conservation";
  r.inputs = run_inputs(traj);
  r.tolerances["relative_drift_per_step"] = tol;
  if (closure != Closure::censored) {
    r.status = "skipped: dirichlet closure leaks mass; use the rate check";
    return r;
  }
  if (traj.diagnostics.empty()) {
    r.status = "inconclusive";
    r.notes.push_back("empty trajectory");
    return r;
  }
  const double m0 = traj.diagnostics.front().mass;
  const double scale = std::abs(m0) > 0.0 ? std::abs(m0) : std::max(traj.diagnostics.front().l1, 1.0);
  if (!(std::abs(m0) > 0.0)) r.notes.push_back("zero initial mass: drift measured against the L1 norm");
  double worst_step = 0.0;
  double worst_total = 0.0;
  for (std::size_t k = 1; k < traj.diagnostics.size(); ++k) {
    const double d = std::abs(traj.diagnostics[k].mass - traj.diagnostics[k - 1].mass) / scale;
    worst_step = std::max(worst_step, d);
    worst_total = std::max(worst_total, std::abs(traj.diagnostics[k].mass - m0) / scale);
  }
  r.measured["initial_mass"] = m0;
  r.measured["max_relative_drift_per_step"] = worst_step;
  r.measured["max_relative_drift_total"] = worst_total;
  r.predicted["relative_drift"] = 0.0;
  r.set_pass(worst_step <= tol && traj.completed);
  if (!traj.completed) r.notes.push_back("run incomplete: " + traj.failure);
  return r;
}

CheckReport check_mass_rate(const std::vector<Trajectory>& runs, const std::vector<double>& radii, double rel_tol) {
  if (runs.size() != radii.size() || runs.size() < 2) {
    throw std::invalid_argument("check_mass_rate: need matching runs and radii (at least two)");
  }
  CheckReport r;
  r.name = "mass_leak_rate";
  const Trajectory& base = runs.front();
  r.inputs = run_inputs(base);
  r.inputs["radii"] = radii;
  const double m_star = critical_exponent(base.Q, base.alpha);
  std::vector<double> drift;
  for (const auto& t : runs) {
    if (!t.completed) {
      r.status = "fail";
      r.notes.push_back("run incomplete: " + t.failure);
      return r;
    }
    drift.push_back(std::abs(t.diagnostics.back().mass - t.diagnostics.front().mass));
  }
  r.measured["drift"] = drift;

  if (base.m > m_star + 1e-12) {
    const double predicted = mass_leak_slope(base.m, base.alpha, base.Q);
    r.predicted["slope"] = predicted;
    r.tolerances["relative"] = rel_tol;
    r.tolerances["min_r_squared"] = 0.98;
    for (double d : drift) {
      if (!(d > 0.0)) {
        r.status = "inconclusive";
        r.notes.push_back("zero drift at some radius; nothing to fit");
        return r;
      }
    }
    const LinearFit fit = fit_power_law(radii, drift);
    r.measured["slope"] = fit.slope;
    r.measured["r_squared"] = fit.r_squared;
    if (fit.r_squared < 0.98) {
      r.status = "inconclusive";
      return r;
    }
    r.set_pass(std::abs(fit.slope - predicted) <= rel_tol * std::abs(predicted));
    return r;
  }

  // at or below m*: the drift must grow sub-linearly in time at every radius
  r.predicted["time_exponent_below"] = 1.0;
  bool ok = true;
  std::vector<double> exps;
  for (const auto& t : runs) {
    std::vector<double> ts, ds;
    const std::size_t half = t.diagnostics.size() / 2;
    const double m0 = t.diagnostics.front().mass;
    for (std::size_t k = std::max<std::size_t>(half, 1); k < t.diagnostics.size(); ++k) {
      const double d = std::abs(t.diagnostics[k].mass - m0);
      if (d > 0.0) {
        ts.push_back(t.times[k]);
        ds.push_back(d);
      }
    }
    if (ts.size() < 2) {
      exps.push_back(0.0);
      continue;
    }
    const LinearFit fit = fit_power_law(ts, ds);
    exps.push_back(fit.slope);
    if (!(fit.slope < 1.0)) ok = false;
  }
  r.measured["time_exponent"] = exps;
  r.set_pass(ok);
  return r;
}

CheckReport check_extinction(const Trajectory& traj, double p, const ExtinctionOptions& opt) {
  CheckReport r;
  r.name = "extinction";
  r.inputs = run_inputs(traj);
  r.inputs["p"] = p;
  r.tolerances["threshold_linf"] = opt.threshold;
  r.tolerances["horizon_factor"] = opt.horizon_factor;
  const double m_star = critical_exponent(traj.Q, traj.alpha);
  const double theta = (traj.Q - traj.alpha) / traj.Q;
  r.predicted["m_star"] = m_star;
  r.predicted["ode_exponent"] = theta;

  double t_ext = -1.0;
  for (std::size_t k = 0; k < traj.diagnostics.size(); ++k) {
    if (traj.diagnostics[k].linf < opt.threshold) {
      t_ext = traj.times[k];
      break;
    }
  }
  r.measured["extinct"] = t_ext >= 0.0;
  if (t_ext >= 0.0) r.measured["observed_extinction_time"] = t_ext;

  if (!(traj.m < m_star)) {
    r.status = "skipped: m >= m*";
    return r;
  }
  const double p_star = integrability_threshold(traj.m, traj.Q, traj.alpha);
  r.predicted["p_star"] = p_star;
  if (!(p > p_star)) {
    r.status = "skipped: p <= p*(m)";
    return r;
  }
  const std::size_t pi = p_index(traj, p);

  std::vector<double> J;
  for (const auto& d : traj.diagnostics) J.push_back(std::pow(d.lp[pi], p));
  double c_hat = kInf;
  std::size_t window = 0;
  for (std::size_t k = 0; k + 1 < traj.diagnostics.size(); ++k) {
    if (traj.diagnostics[k].linf < opt.threshold || !(J[k] > 0.0)) break;
    const double dt = traj.diagnostics[k + 1].dt;
    const double c = -(J[k + 1] - J[k]) / (dt * std::pow(J[k], theta));
    c_hat = std::min(c_hat, c);
    ++window;
  }
  if (window == 0) {
    r.status = "inconclusive";
    r.notes.push_back("no decay window");
    return r;
  }
  const double t_hat = std::pow(J.front(), traj.alpha / traj.Q) * traj.Q / (traj.alpha * c_hat);
  r.measured["C_hat"] = c_hat;
  r.measured["window_steps"] = window;
  r.measured["J0"] = J.front();
  r.predicted["extinction_time_bound"] = t_hat;
  if (!(c_hat > 0.0)) {
    r.status = "fail";
    r.notes.push_back("differential inequality violated: some step did not decrease J");
    return r;
  }
  if (t_ext < 0.0) {
    if (traj.times.back() < opt.horizon_factor * t_hat) {
      r.status = "inconclusive";
      r.notes.push_back("run ended before the extinction horizon");
    } else {
      r.status = "fail";
    }
    return r;
  }
  r.set_pass(t_ext <= opt.horizon_factor * t_hat);
  return r;
}

CheckReport check_no_extinction(const Trajectory& traj, double threshold) {
  CheckReport r;
  r.name = "no_extinction";
  r.inputs = run_inputs(traj);
  r.tolerances["threshold_linf"] = threshold;
  double min_linf = kInf;
  for (const auto& d : traj.diagnostics) min_linf = std::min(min_linf, d.linf);
  r.measured["min_linf"] = min_linf;
  r.set_pass(traj.completed && min_linf >= threshold);
  return r;
}

ExponentReport fit_smoothing(const Trajectory& traj, double p, const SmoothingOptions& opt) {
  ExponentReport e;
  CheckReport& r = e.report;
  r.name = "smoothing_exponent";
  r.inputs = run_inputs(traj);
  r.inputs["p"] = p;
  r.tolerances = {{"relative", opt.rel_tol},
                  {"min_r_squared", opt.min_r_squared},
                  {"start_fraction", opt.start_fraction},
                  {"decades", opt.decades}};
  const double gamma = smoothing_gamma(traj.m, traj.alpha, traj.Q, p);
  e.predicted_exponent = -gamma;
  r.predicted["slope"] = -gamma;
  r.predicted["gamma_p"] = gamma;
  r.predicted["delta_p"] = smoothing_delta(traj.m, traj.alpha, traj.Q, p);

  if (traj.diagnostics.size() < 3) {
    r.notes.push_back("trajectory too short");
    e.status = r.status = "inconclusive";
    return e;
  }
  const double linf0 = traj.diagnostics.front().linf;
  std::size_t start = 0;
  for (std::size_t k = 1; k < traj.diagnostics.size(); ++k) {
    if (traj.diagnostics[k].linf <= opt.start_fraction * linf0) {
      start = k;
      break;
    }
  }
  if (start == 0) {
    r.notes.push_back("|u|_inf never dropped to the window start fraction");
    e.status = r.status = "inconclusive";
    return e;
  }
  e.t_min = traj.times[start];
  const double t_end = e.t_min * std::pow(10.0, opt.decades);
  std::vector<double> ts, vs;
  for (std::size_t k = start; k < traj.diagnostics.size() && traj.times[k] <= t_end * (1.0 + 1e-12); ++k) {
    if (!(traj.diagnostics[k].linf > 0.0)) break;
    ts.push_back(traj.times[k]);
    vs.push_back(traj.diagnostics[k].linf);
  }
  e.t_max = ts.back();
  e.points = ts.size();
  r.measured["t_min"] = e.t_min;
  r.measured["t_max"] = e.t_max;
  r.measured["points"] = e.points;
  if (ts.size() < 3) {
    r.notes.push_back("fewer than three points in the window");
    e.status = r.status = "inconclusive";
    return e;
  }
  const LinearFit fit = fit_power_law(ts, vs);
  e.fitted_exponent = fit.slope;
  e.r_squared = fit.r_squared;
  r.measured["slope"] = fit.slope;
  r.measured["r_squared"] = fit.r_squared;
  r.measured["constant"] = std::exp(fit.intercept);
  if (traj.times.back() < t_end * (1.0 - 1e-9)) {
    r.notes.push_back("run ended before the window closed");
    e.status = r.status = "inconclusive";
    return e;
  }
  if (fit.r_squared < opt.min_r_squared) {
    e.status = r.status = "inconclusive";
    return e;
  }
  e.pass = std::abs(fit.slope - e.predicted_exponent) <= opt.rel_tol * std::abs(e.predicted_exponent);
  r.set_pass(e.pass);
  e.status = r.status;
  return e;
}

CheckReport data_scaling_exponent(const Trajectory& a, const Trajectory& b, double p) {
  CheckReport r;
  r.name = "smoothing_data_scaling";
  r.inputs = run_inputs(a);
  r.inputs["p"] = p;
  r.predicted["delta_p"] = smoothing_delta(a.m, a.alpha, a.Q, p);
  const std::size_t k = std::min(a.steps(), b.steps());
  const std::size_t pi = p_index(a, p);
  const std::size_t pj = p_index(b, p);
  const double num = std::log(b.diagnostics[k].linf / a.diagnostics[k].linf);
  const double den = std::log(b.diagnostics[0].lp[pj] / a.diagnostics[0].lp[pi]);
  r.measured["time"] = a.times[k];
  r.measured["exponent"] = den != 0.0 ? num / den : 0.0;
  r.status = "inconclusive";
  r.notes.push_back("reported only: the smoothing estimate is an upper bound with an unknown constant");
  return r;
}

CheckReport check_contraction(const Trajectory& a, const Trajectory& b, double tol) {
  if (a.times.size() != b.times.size()) throw std::invalid_argument("check_contraction: mismatched schedules");
  for (std::size_t k = 0; k < a.times.size(); ++k) {
    if (a.times[k] != b.times[k]) throw std::invalid_argument("check_contraction: mismatched schedules");
  }
  if (!(a.grid == b.grid)) throw std::invalid_argument("check_contraction: mismatched grids");
  CheckReport r;
  r.name = "l1_contraction";
  r.inputs = run_inputs(a);
  r.tolerances["per_step"] = tol;
  std::vector<double> pos, dist;
  bool ordered = true;
  const DiscreteField* a0 = a.field_at_step(0);
  const DiscreteField* b0 = b.field_at_step(0);
  for (std::size_t i = 0; i < a0->size(); ++i) {
    if ((*a0)[i] < (*b0)[i]) ordered = false;
  }
  double order_violation = 0.0;
  for (std::size_t k = 0; k <= a.steps(); ++k) {
    const DiscreteField* fa = a.field_at_step(k);
    const DiscreteField* fb = b.field_at_step(k);
    if (!fa || !fb) continue;
    pos.push_back(positive_part_l1(*fa, *fb));
    dist.push_back(l1_distance(*fa, *fb));
    if (ordered) {
      for (std::size_t i = 0; i < fa->size(); ++i) order_violation = std::max(order_violation, (*fb)[i] - (*fa)[i]);
    }
  }
  double worst_pos = -kInf, worst_dist = -kInf;
  for (std::size_t k = 1; k < pos.size(); ++k) {
    worst_pos = std::max(worst_pos, pos[k] - pos[k - 1]);
    worst_dist = std::max(worst_dist, dist[k] - dist[k - 1]);
  }
  if (pos.size() < 2) worst_pos = worst_dist = 0.0;
  r.measured["initial_positive_part"] = pos.front();
  r.measured["final_positive_part"] = pos.back();
  r.measured["initial_l1_distance"] = dist.front();
  r.measured["final_l1_distance"] = dist.back();
  r.measured["max_positive_part_increase"] = worst_pos;
  r.measured["max_l1_distance_increase"] = worst_dist;
  r.measured["ordered_data"] = ordered;
  bool ok = worst_pos <= tol && worst_dist <= tol;
  if (ordered) {
    r.measured["max_order_violation"] = order_violation;
    ok = ok && order_violation <= tol;
  }
  r.set_pass(ok && a.completed && b.completed);
  return r;
}

CheckReport check_scaling(const EvolutionConfig& cfg, const DiscreteField& u0, double lambda,
                          std::optional<double> tol) {
  cfg.validate();
  const NonlocalOperator op = assemble(cfg.grid, cfg.kernel, cfg.quad);
  return check_scaling(op, cfg, u0, lambda, tol);
}

CheckReport check_scaling(const NonlocalOperator& op, const EvolutionConfig& cfg, const DiscreteField& u0,
                          double lambda, std::optional<double> tol) {
  if (!(lambda > 0.0)) throw std::invalid_argument("check_scaling: lambda must be > 0");
  const double limit = tol ? *tol : 10.0 * cfg.resolvent_tol;
  CheckReport r;
  r.name = "scaling_covariance";
  EvolutionConfig base = cfg;
  base.diagnostics_only = false;
  EvolutionConfig scaled = base;
  const double factor = std::pow(lambda, -(cfg.m - 1.0));
  for (double& dt : scaled.dt_schedule) dt *= factor;
  DiscreteField v0 = u0;
  for (double& v : v0.values) v *= lambda;
  const Trajectory ta = run(op, base, u0);
  const Trajectory tb = run(op, scaled, v0);
  r.inputs = run_inputs(ta);
  r.inputs["lambda"] = lambda;
  r.inputs["dt_factor"] = factor;
  r.tolerances["max_abs_deviation"] = limit;
  double worst = 0.0;
  const std::size_t steps = std::min(ta.steps(), tb.steps());
  for (std::size_t k = 0; k <= steps; ++k) {
    const DiscreteField* fa = ta.field_at_step(k);
    const DiscreteField* fb = tb.field_at_step(k);
    for (std::size_t i = 0; i < fa->size(); ++i) worst = std::max(worst, std::abs((*fb)[i] - lambda * (*fa)[i]));
  }
  r.measured["max_abs_deviation"] = worst;
  r.predicted["max_abs_deviation"] = 0.0;
  r.set_pass(worst <= limit && ta.completed && tb.completed);
  if (!ta.completed) r.notes.push_back("base run incomplete: " + ta.failure);
  if (!tb.completed) r.notes.push_back("scaled run incomplete: " + tb.failure);
  return r;
}

CheckReport check_lp_decay(const Trajectory& traj, double rel_tol) {
  CheckReport r;
  r.name = "lp_decay";
  r.inputs = run_inputs(traj);
  r.inputs["p"] = traj.p_list;
  r.tolerances["relative_increase_per_step"] = rel_tol;
  json worst = json::object();
  bool ok = true;
  auto scan = [&](const std::string& label, auto value) {
    double w = -kInf;
    for (std::size_t k = 1; k < traj.diagnostics.size(); ++k) {
      const double prev = value(traj.diagnostics[k - 1]);
      const double cur = value(traj.diagnostics[k]);
      const double inc = prev > 0.0 ? (cur - prev) / prev : cur - prev;
      w = std::max(w, inc);
    }
    if (traj.diagnostics.size() < 2) w = 0.0;
    worst[label] = w;
    if (w > rel_tol) ok = false;
  };
  for (std::size_t j = 0; j < traj.p_list.size(); ++j) {
    std::ostringstream label;
    label << "p=" << traj.p_list[j];
    scan(label.str(), [j](const StepDiagnostics& d) { return d.lp[j]; });
  }
  scan("p=inf", [](const StepDiagnostics& d) { return d.linf; });
  r.measured["max_relative_increase"] = worst;
  r.set_pass(ok && traj.completed);
  return r;
}

CheckReport check_energy_inequality(const Trajectory& traj, double tol) {
  CheckReport r;
  r.name = "energy_inequality";
  r.inputs = run_inputs(traj);
  r.tolerances["absolute"] = tol;
  const double q = traj.m + 1.0;
  const DiscreteField* u0 = traj.field_at_step(0);
  const DiscreteField* uN = traj.field_at_step(traj.steps());
  if (!u0 || !uN) throw std::invalid_argument("check_energy_inequality: first and last fields must be stored");
  double dissipated = 0.0;
  for (std::size_t k = 1; k < traj.diagnostics.size(); ++k) {
    dissipated += traj.diagnostics[k].dt * traj.diagnostics[k].energy_mm;
  }
  const double final_term = std::pow(lp_norm(*uN, q), q) / q;
  const double initial_term = std::pow(lp_norm(*u0, q), q) / q;
  r.measured["dissipated"] = dissipated;
  r.measured["final_term"] = final_term;
  r.measured["lhs"] = dissipated + final_term;
  r.measured["rhs"] = initial_term;
  r.measured["margin"] = initial_term + tol - dissipated - final_term;
  r.set_pass(dissipated + final_term <= initial_term + tol && traj.completed);
  return r;
}

CheckReport check_time_derivative(const Trajectory& traj, double t_min, double slack) {
  CheckReport r;
  r.name = "time_derivative_bound";
  r.inputs = run_inputs(traj);
  r.inputs["t_min"] = t_min;
  r.tolerances["slack"] = slack;
  if (traj.m == 1.0) {
    r.status = "skipped: m = 1";
    return r;
  }
  const double l1_0 = traj.diagnostics.front().l1;
  double worst = 0.0;
  std::vector<double> ts, rates;
  for (std::size_t k = 1; k + 1 <= traj.steps(); ++k) {
    if (traj.times[k] < t_min) continue;
    const DiscreteField* a = traj.field_at_step(k);
    const DiscreteField* b = traj.field_at_step(k + 1);
    if (!a || !b) continue;
    const double rate = l1_distance(*b, *a) / traj.diagnostics[k + 1].dt;
    const double bound = 2.0 * l1_0 / (std::abs(traj.m - 1.0) * traj.times[k]);
    worst = std::max(worst, rate / bound);
    if (rate > 0.0) {
      ts.push_back(traj.times[k]);
      rates.push_back(rate);
    }
  }
  r.measured["max_rate_over_bound"] = worst;
  if (ts.size() >= 2) {
    const LinearFit fit = fit_power_law(ts, rates);
    r.measured["rate_slope"] = fit.slope;
    r.measured["rate_r_squared"] = fit.r_squared;
  }
  r.predicted["rate_over_bound_at_most"] = 1.0;
  if (ts.empty()) {
    r.status = "inconclusive";
    return r;
  }
  r.set_pass(worst <= 1.0 + slack);
  return r;
}

CheckReport check_stroock_varopoulos(const NonlocalOperator& op, const std::vector<double>& m_values, int fields,
                                     std::uint64_t seed, double tol) {
  CheckReport r;
  r.name = "stroock_varopoulos";
  r.inputs = {{"nodes", op.size()}, {"fields", fields}, {"m", m_values}, {"seed", seed}};
  r.tolerances["relative_violation"] = tol;
  Rng rng(seed);
  DiscreteField f(op.grid());
  json worst = json::object();
  bool ok = true;
  for (double m : m_values) {
    const double c = 4.0 * m / ((m + 1.0) * (m + 1.0));
    double w = -kInf;
    Rng local(rng.next());
    for (int k = 0; k < fields; ++k) {
      // mix dense and sparse supports so that zero values appear
      const double zero_fraction = local.uniform();
      for (double& v : f.values) v = local.uniform() < zero_fraction ? 0.0 : local.uniform();
      const DiscreteField fm = signed_power(f, m);
      const DiscreteField fh = signed_power(f, 0.5 * (m + 1.0));
      const double lhs = dirichlet_form(op, fm, f);
      const double rhs = c * dirichlet_form(op, fh, fh);
      const double scale = std::max(std::abs(lhs), std::numeric_limits<double>::min());
      w = std::max(w, (rhs - lhs) / scale);
    }
    std::ostringstream label;
    label << "m=" << m;
    worst[label.str()] = w;
    if (w > tol) ok = false;
  }
  r.measured["max_relative_violation"] = worst;
  r.set_pass(ok);
  return r;
}

CheckReport check_operator_oracle(const GridSpec& grid, const KernelSpec& kernel, const QuadratureConfig& quad,
                                  int fields, std::uint64_t seed, double tol) {
  CheckReport r;
  r.name = "operator_oracle";
  r.inputs = {{"kernel", to_string(kernel.family)},
              {"alpha", kernel.alpha},
              {"points_per_axis_z", grid.points_per_axis_z},
              {"points_per_axis_s", grid.points_per_axis_s},
              {"closure", to_string(grid.closure)},
              {"fields", fields},
              {"seed", seed}};
  r.tolerances["max_relative_deviation"] = tol;
  const OracleComparison c = compare_with_oracle(grid, kernel, quad, fields, seed);
  r.measured["max_weight_rel"] = c.max_weight_rel;
  r.measured["max_tail_rel"] = c.max_tail_rel;
  r.measured["max_apply_rel"] = c.max_apply_rel;
  r.measured["symmetric"] = c.symmetric;
  r.set_pass(c.symmetric && c.max_weight_rel <= tol && c.max_tail_rel <= tol && c.max_apply_rel <= tol);
  return r;
}

CheckReport check_annulus_identity(const GroupContext& ctx, double tol, double ratio_tol) {
  CheckReport r;
  r.name = "annulus_identity";
  r.inputs = {{"n", ctx.n}, {"Q", ctx.Q}};
  const double i12 = annulus_integral(ctx, 0.0, 1.0, 2.0);
  const double i14 = annulus_integral(ctx, 0.0, 1.0, 4.0);
  const double expected = ctx.C0 * std::log(2.0);
  r.measured["integral_1_2"] = i12;
  r.measured["ratio_14_12"] = i14 / i12;
  r.predicted["integral_1_2"] = expected;
  r.predicted["ratio_14_12"] = 2.0;
  r.tolerances["relative"] = tol;
  r.tolerances["ratio_relative"] = ratio_tol;
  r.set_pass(std::abs(i12 / expected - 1.0) <= tol && std::abs(i14 / i12 / 2.0 - 1.0) <= ratio_tol);
  return r;
}

CheckReport check_resolvent_contract(const NonlocalOperator& op, const std::vector<double>& m_values,
                                     std::uint64_t seed, const ResolventContractOptions& opt) {
  CheckReport r;
  r.name = "resolvent_contract";
  r.inputs = {{"nodes", op.size()},
              {"closure", to_string(op.grid().closure)},
              {"m", m_values},
              {"problems_per_m", opt.problems},
              {"epsilon", opt.epsilon},
              {"seed", seed}};
  r.tolerances = {{"residual", opt.solve_tol},
                  {"sup_slack", opt.sup_slack},
                  {"contraction_margin", opt.contraction_margin}};
  Rng rng(seed);
  double worst_residual = 0.0;
  double worst_sup = -kInf;
  double worst_margin = kInf;
  int unconverged = 0;
  for (double m : m_values) {
    DiscreteField previous;
    for (int k = 0; k < opt.problems; ++k) {
      DiscreteField g(op.grid());
      for (double& v : g.values) v = rng.uniform(-1.0, 1.0);
      ResolventProblem prob{op, g, m, opt.epsilon, opt.solve_tol, 500};
      const auto [v, rep] = solve(prob);
      if (!rep.converged) ++unconverged;
      worst_residual = std::max(worst_residual, rep.final_residual_inf);
      const DiscreteField u = signed_power(v, 1.0 / m);
      worst_sup = std::max(worst_sup, lp_norm(u, kInf) - lp_norm(g, kInf));
      if (k > 0) {
        const ContractionCheck c = t_contraction_check(op, g, previous, m, opt.epsilon, opt.solve_tol);
        worst_margin = std::min(worst_margin, c.rhs - c.lhs);
      }
      previous = g;
    }
  }
  r.measured["max_residual"] = worst_residual;
  r.measured["max_sup_excess"] = worst_sup;
  r.measured["min_contraction_margin"] = worst_margin;
  r.measured["unconverged"] = unconverged;
  r.set_pass(unconverged == 0 && worst_residual <= opt.solve_tol && worst_sup <= opt.sup_slack &&
             worst_margin >= opt.contraction_margin);
  return r;
}

}  // namespace nlfilt
