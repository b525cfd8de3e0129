#include "nlfilt/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace nlfilt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

StepDiagnostics measure(const NonlocalOperator& op, const DiscreteField& u, double m,
                        const std::vector<double>& p_list) {
  StepDiagnostics d;
  d.mass = mass(u);
  d.l1 = lp_norm(u, 1.0);
  d.l2 = lp_norm(u, 2.0);
  d.linf = lp_norm(u, kInf);
  for (double p : p_list) d.lp.push_back(lp_norm(u, p));
  const DiscreteField w = signed_power(u, m);
  d.energy_mm = dirichlet_form(op, w, w);
  return d;
}

std::string p_label(double p) {
  if (std::isinf(p)) return "inf";
  std::ostringstream s;
  s << p;
  return s.str();
}

}  // namespace

std::vector<double> uniform_schedule(double dt, double horizon) {
  if (!(dt > 0.0) || !(horizon > 0.0)) throw std::invalid_argument("uniform_schedule: dt and horizon must be > 0");
  std::vector<double> out;
  double t = 0.0;
  while (t < horizon * (1.0 - 1e-12)) {
    const double step = std::min(dt, horizon - t);
    out.push_back(step);
    t += step;
  }
  return out;
}

std::vector<double> geometric_schedule(double dt0, double ratio, double horizon) {
  if (!(dt0 > 0.0) || !(ratio > 0.0) || !(horizon > 0.0)) {
    throw std::invalid_argument("geometric_schedule: dt0, ratio and horizon must be > 0");
  }
  std::vector<double> out;
  double t = 0.0;
  double dt = dt0;
  while (t < horizon * (1.0 - 1e-12)) {
    const double step = std::min(dt, horizon - t);
    out.push_back(step);
    t += step;
    dt *= ratio;
    if (out.size() > 10'000'000) throw std::invalid_argument("geometric_schedule: too many steps");
  }
  return out;
}

void EvolutionConfig::validate() const {
  if (!(m > 0.0)) throw std::invalid_argument("evolution: m must be > 0");
  kernel.check_parameters();
  grid.validate();
  quad.validate();
  if (dt_schedule.empty()) throw std::invalid_argument("evolution: dt schedule is empty");
  for (double dt : dt_schedule) {
    if (!(dt > 0.0)) throw std::invalid_argument("evolution: every dt must be > 0");
  }
  if (!(resolvent_tol > 0.0)) throw std::invalid_argument("evolution: resolvent_tol must be > 0");
  for (double p : diagnostics_p_list) {
    if (!(p >= 1.0)) throw std::invalid_argument("evolution: diagnostic p must be >= 1");
  }
}

const DiscreteField* Trajectory::field_at_step(std::size_t step) const {
  for (std::size_t k = 0; k < field_steps.size(); ++k) {
    if (field_steps[k] == step) return &fields[k];
  }
  return nullptr;
}

DiscreteField step(const NonlocalOperator& op, const DiscreteField& u_prev, double m, double dt, double tol,
                   SolverReport* report, int max_iters) {
  if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be > 0");
  ResolventProblem prob{op, u_prev, m, dt, tol, max_iters};
  auto [w, rep] = solve(prob);
  if (report) *report = rep;
  if (!rep.converged) {
    std::ostringstream msg;
    msg << "resolvent did not converge: residual " << rep.final_residual_inf << " after " << rep.iterations
        << " iterations (tol " << tol << ")";
    throw StepFailure(msg.str(), rep);
  }
  return signed_power(w, 1.0 / m);
}

Trajectory run(const EvolutionConfig& cfg, const DiscreteField& u0) {
  cfg.validate();
  const NonlocalOperator op = assemble(cfg.grid, cfg.kernel, cfg.quad);
  return run(op, cfg, u0);
}

Trajectory run(const NonlocalOperator& op, const EvolutionConfig& cfg, const DiscreteField& u0) {
  cfg.validate();
  if (!(u0.grid == op.grid())) throw std::invalid_argument("run: initial data not on the operator grid");
  u0.check();

  Trajectory traj;
  traj.m = cfg.m;
  traj.alpha = cfg.alpha();
  traj.Q = op.context().Q;
  traj.grid = op.grid();
  traj.p_list = cfg.diagnostics_p_list;

  const double m_star = critical_exponent(traj.Q, traj.alpha);
  if (cfg.m <= m_star) {
    std::ostringstream w;
    w << "m = " << cfg.m << " <= m* = " << m_star << ": initial data should lie in L^p for p > "
      << integrability_threshold(cfg.m, traj.Q, traj.alpha) << " (always true on a finite grid)";
    traj.warnings.push_back(w.str());
  }

  StepDiagnostics d0 = measure(op, u0, cfg.m, cfg.diagnostics_p_list);
  traj.times.push_back(0.0);
  traj.diagnostics.push_back(d0);
  traj.fields.push_back(u0);
  traj.field_steps.push_back(0);

  std::size_t next_checkpoint = 0;
  std::vector<double> checkpoints = cfg.checkpoint_times;
  std::sort(checkpoints.begin(), checkpoints.end());

  DiscreteField u = u0;
  double t = 0.0;
  const std::size_t total = cfg.dt_schedule.size();
  for (std::size_t k = 0; k < total; ++k) {
    const double dt = cfg.dt_schedule[k];
    SolverReport rep;
    try {
      u = step(op, u, cfg.m, dt, cfg.resolvent_tol, &rep, cfg.resolvent_max_iters);
    } catch (const StepFailure& e) {
      traj.completed = false;
      traj.failure = "step " + std::to_string(k + 1) + ": " + e.what();
      break;
    } catch (const NumericalFailure& e) {
      traj.completed = false;
      traj.failure = "step " + std::to_string(k + 1) + ": " + e.what();
      break;
    }
    t += dt;
    StepDiagnostics d = measure(op, u, cfg.m, cfg.diagnostics_p_list);
    d.step = static_cast<int>(k + 1);
    d.t = t;
    d.dt = dt;
    d.solver = rep;
    traj.times.push_back(t);
    traj.diagnostics.push_back(std::move(d));

    bool keep = !cfg.diagnostics_only || k + 1 == total;
    while (next_checkpoint < checkpoints.size() && t >= checkpoints[next_checkpoint] * (1.0 - 1e-12)) {
      keep = true;
      ++next_checkpoint;
    }
    if (keep) {
      traj.fields.push_back(u);
      traj.field_steps.push_back(k + 1);
    }
  }
  if (!traj.completed && cfg.diagnostics_only && traj.field_steps.back() != traj.steps()) {
    traj.fields.push_back(u);
    traj.field_steps.push_back(traj.steps());
  }
  return traj;
}

void write_diagnostics_csv(const Trajectory& traj, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_diagnostics_csv: cannot open '" + path + "'");
  out << "step,t,dt,mass,l1,l2,linf";
  for (double p : traj.p_list) out << ",lp_" << p_label(p);
  out << ",energy_mm,resolvent_iters,residual\n";
  out << std::setprecision(17);
  for (const auto& d : traj.diagnostics) {
    out << d.step << ',' << d.t << ',' << d.dt << ',' << d.mass << ',' << d.l1 << ',' << d.l2 << ',' << d.linf;
    for (double v : d.lp) out << ',' << v;
    out << ',' << d.energy_mm << ',' << d.solver.iterations << ',' << d.solver.final_residual_inf << '\n';
  }
}

}  // namespace nlfilt
