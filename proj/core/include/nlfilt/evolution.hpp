#pragma once

// Implicit Euler (Crandall-Liggett) marching for  d_t u + L(|u|^{m-1}u) = 0.
// Each step solves  w^{1/m} + dt L w = u_prev  and sets u = w^{1/m}.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nlfilt/grid.hpp"
#include "nlfilt/kernels.hpp"
#include "nlfilt/nonlocal_operator.hpp"
#include "nlfilt/resolvent.hpp"

namespace nlfilt {

/// dt_j = dt for steps up to the horizon (the last step is shortened to land on it).
std::vector<double> uniform_schedule(double dt, double horizon);
/// dt_j = dt0 * ratio^j until the cumulative time reaches the horizon.
std::vector<double> geometric_schedule(double dt0, double ratio, double horizon);

struct EvolutionConfig {
  double m = 2.0;
  KernelSpec kernel = KernelSpec::pure_power(1.0);
  GridSpec grid;
  QuadratureConfig quad;
  std::vector<double> dt_schedule;
  double resolvent_tol = 1e-10;
  int resolvent_max_iters = 100;
  std::vector<double> diagnostics_p_list{1.0, 2.0};
  /// Store fields only at step 0, the final step and the first step at or
  /// after each checkpoint time.
  bool diagnostics_only = false;
  std::vector<double> checkpoint_times;

  double alpha() const noexcept { return kernel.alpha; }
  void validate() const;
};

struct StepDiagnostics {
  int step = 0;
  double t = 0.0;
  double dt = 0.0;
  double mass = 0.0;
  double l1 = 0.0;
  double l2 = 0.0;
  double linf = 0.0;
  std::vector<double> lp;  // aligned with the configured p list
  double energy_mm = 0.0;  // E(u^m, u^m)
  SolverReport solver;
};

struct Trajectory {
  double m = 0.0;
  double alpha = 0.0;
  int Q = 0;
  GridSpec grid;
  std::vector<double> p_list;
  std::vector<double> times;
  std::vector<StepDiagnostics> diagnostics;
  /// Stored fields and the step index each belongs to.
  std::vector<DiscreteField> fields;
  std::vector<std::size_t> field_steps;
  bool completed = true;
  std::string failure;
  std::vector<std::string> warnings;

  std::size_t steps() const noexcept { return times.empty() ? 0 : times.size() - 1; }
  /// Field stored for a given step, or nullptr.
  const DiscreteField* field_at_step(std::size_t step) const;
};

struct StepFailure : std::runtime_error {
  StepFailure(const std::string& what, SolverReport r) : std::runtime_error(what), report(r) {}
  SolverReport report;
};

/// One implicit step. Throws StepFailure when the resolvent does not converge.
DiscreteField step(const NonlocalOperator& op, const DiscreteField& u_prev, double m, double dt, double tol,
                   SolverReport* report = nullptr, int max_iters = 100);

/// Assembles the operator from cfg and marches. A failing step ends the run
/// with completed = false and the partial trajectory.
Trajectory run(const EvolutionConfig& cfg, const DiscreteField& u0);
Trajectory run(const NonlocalOperator& op, const EvolutionConfig& cfg, const DiscreteField& u0);

/// Columns step,t,dt,mass,l1,l2,linf,lp_<p>...,energy_mm,resolvent_iters,residual.
void write_diagnostics_csv(const Trajectory& traj, const std::string& path);

}  // namespace nlfilt
