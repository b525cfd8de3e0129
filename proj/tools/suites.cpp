#include "suites.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nlfilt/checks.hpp"
#include "nlfilt/holder.hpp"
#include "nlfilt/initial_data.hpp"

namespace nlfilt::cli {

namespace {

using Checks = std::vector<CheckReport>;

DiscreteField initial_field(const Config& cfg) { return make_initial_data(cfg.grid(), cfg.initial()); }

EvolutionConfig with_p(EvolutionConfig e, double p) {
  if (std::find(e.diagnostics_p_list.begin(), e.diagnostics_p_list.end(), p) == e.diagnostics_p_list.end()) {
    e.diagnostics_p_list.push_back(p);
  }
  return e;
}

void note_failure(CheckReport& r, const Trajectory& t) {
  if (!t.completed) r.notes.push_back("run incomplete: " + t.failure);
  for (const auto& w : t.warnings) r.notes.push_back(w);
}

Checks operator_oracle(const Config& cfg) {
  return {check_operator_oracle(cfg.grid(), cfg.kernel(), cfg.quad(), cfg.integer("verify.fields"), cfg.seed()),
          check_annulus_identity(make_group_context(cfg.grid().n))};
}

Checks stroock_varopoulos(const Config& cfg) {
  const NonlocalOperator op = assemble(cfg.grid(), cfg.kernel(), cfg.quad());
  return {check_stroock_varopoulos(op, cfg.numbers("verify.m_values"), cfg.integer("verify.fields"), cfg.seed())};
}

Checks resolvent(const Config& cfg) {
  const NonlocalOperator op = assemble(cfg.grid(), cfg.kernel(), cfg.quad());
  ResolventContractOptions opt;
  opt.problems = cfg.integer("verify.problems");
  opt.epsilon = cfg.number("verify.epsilon");
  opt.solve_tol = cfg.number("evolution.resolvent_tol");
  return {check_resolvent_contract(op, cfg.numbers("verify.m_values"), cfg.seed(), opt)};
}

Checks contraction(const Config& cfg) {
  const EvolutionConfig e = cfg.evolution();
  const NonlocalOperator op = assemble(e.grid, e.kernel, e.quad);
  InitialData other = cfg.initial();
  other.preset = other.preset == "two_bump" ? "koranyi_bump" : "two_bump";
  other.amplitude *= 0.8;
  const Trajectory a = run(op, e, initial_field(cfg));
  const Trajectory b = run(op, e, make_initial_data(e.grid, other));
  if (!a.completed || !b.completed) {
    CheckReport r;
    r.name = "l1_contraction";
    r.status = "fail";
    note_failure(r, a);
    note_failure(r, b);
    return {r};
  }
  CheckReport r = check_contraction(a, b, 10.0 * e.resolvent_tol);
  r.inputs["second_preset"] = other.preset;
  return {r};
}

Checks mass(const Config& cfg) {
  const EvolutionConfig e = cfg.evolution();
  const DiscreteField u0 = initial_field(cfg);
  if (e.grid.closure == Closure::censored) {
    const Trajectory t = run(e, u0);
    CheckReport r = check_mass(t, Closure::censored);
    note_failure(r, t);
    return {r};
  }
  const auto radii = cfg.numbers("verify.radii");
  std::vector<Trajectory> runs;
  for (double R : radii) {
    EvolutionConfig er = e;
    er.diagnostics_only = true;
    er.quad.tail_radius = R;
    runs.push_back(run(er, u0));
  }
  if (runs.size() < 2) {
    CheckReport r;
    r.name = "mass_leak_rate";
    r.status = "inconclusive";
    r.notes.push_back("verify.radii needs at least two radii");
    return {r};
  }
  return {check_mass_rate(runs, radii, cfg.number("verify.mass_rate_rel_tol"))};
}

Checks decay(const Config& cfg) {
  EvolutionConfig e = with_p(cfg.evolution(), INFINITY);
  const Trajectory t = run(e, initial_field(cfg));
  Checks out{check_lp_decay(t), check_energy_inequality(t)};
  const double horizon = t.times.back();
  out.push_back(check_time_derivative(t, 0.1 * horizon));
  for (auto& r : out) note_failure(r, t);
  return out;
}

Checks smoothing(const Config& cfg) {
  const double p = cfg.number("verify.smoothing_p");
  EvolutionConfig e = with_p(cfg.evolution(), p);
  e.diagnostics_only = true;
  const NonlocalOperator op = assemble(e.grid, e.kernel, e.quad);
  const DiscreteField u0 = initial_field(cfg);
  const Trajectory a = run(op, e, u0);
  SmoothingOptions opt;
  opt.rel_tol = cfg.number("verify.smoothing_rel_tol");
  ExponentReport fit = fit_smoothing(a, p, opt);
  note_failure(fit.report, a);
  DiscreteField v0 = u0;
  for (double& x : v0.values) x *= 2.0;
  const Trajectory b = run(op, e, v0);
  return {fit.report, data_scaling_exponent(a, b, p)};
}

Checks extinction(const Config& cfg) {
  const double p = cfg.number("verify.extinction_p");
  const double threshold = cfg.number("verify.extinction_threshold");
  EvolutionConfig e = with_p(cfg.evolution(), p);
  e.diagnostics_only = true;
  const Trajectory t = run(e, initial_field(cfg));
  ExtinctionOptions opt;
  opt.threshold = threshold;
  CheckReport r = check_extinction(t, p, opt);
  note_failure(r, t);
  Checks out{r};
  if (!(t.m < critical_exponent(t.Q, t.alpha))) out.push_back(check_no_extinction(t, threshold));
  return out;
}

Checks scaling(const Config& cfg) {
  const EvolutionConfig e = cfg.evolution();
  return {check_scaling(e, initial_field(cfg), cfg.number("verify.lambda"))};
}

Checks holder(const Config& cfg) {
  EvolutionConfig e = cfg.evolution();
  e.diagnostics_only = false;
  const Trajectory t = run(e, initial_field(cfg));
  HolderOptions opt;
  opt.R = cfg.number("verify.holder_R");
  opt.depth = cfg.integer("verify.holder_depth");
  opt.r_base = cfg.number("verify.holder_r_base");
  opt.degenerate = cfg.flag("verify.holder_degenerate");
  const double t0 = cfg.number("verify.holder_t0") > 0.0 ? cfg.number("verify.holder_t0") : t.times.back();
  HolderReport h = holder_diagnostic(t, GroupPoint::from_coords(cfg.numbers("verify.holder_center")), t0, opt);
  note_failure(h.report, t);
  return {h.report};
}

using SuiteFn = Checks (*)(const Config&);

const std::vector<std::pair<std::string, SuiteFn>>& table() {
  static const std::vector<std::pair<std::string, SuiteFn>> t{
      {"operator_oracle", operator_oracle}, {"stroock_varopoulos", stroock_varopoulos},
      {"resolvent", resolvent},             {"contraction", contraction},
      {"mass", mass},                       {"decay", decay},
      {"smoothing", smoothing},             {"extinction", extinction},
      {"scaling", scaling},                 {"holder", holder},
  };
  return t;
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, fn] : table()) out.push_back(name);
    out.push_back("all");
    return out;
  }();
  return names;
}

std::vector<CheckReport> run_suite(const std::string& name, const Config& cfg) {
  Checks out;
  for (const auto& [suite, fn] : table()) {
    if (name == suite || name == "all") {
      Checks part = fn(cfg);
      out.insert(out.end(), part.begin(), part.end());
    }
  }
  if (out.empty()) throw std::invalid_argument("unknown suite '" + name + "'");
  return out;
}

}  // namespace nlfilt::cli
