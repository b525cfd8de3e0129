#pragma once

// Quantitative checks on trajectories and operators. Exponents and inequality
// directions are asserted; constants are fitted and only reported.

#include <optional>
#include <vector>

#include "nlfilt/evolution.hpp"
#include "nlfilt/fit.hpp"
#include "nlfilt/grid.hpp"
#include "nlfilt/hgroup.hpp"
#include "nlfilt/nonlocal_operator.hpp"
#include "nlfilt/report.hpp"

namespace nlfilt {

/// gamma_p = (m - 1 + alpha p / Q)^{-1}.
double smoothing_gamma(double m, double alpha, int Q, double p);
/// delta_p = alpha p gamma_p / Q.
double smoothing_delta(double m, double alpha, int Q, double p);
/// -alpha + Q (p - 1) / p with p = max(1, 1/m).
double mass_leak_slope(double m, double alpha, int Q);

/// assemble()/apply() against the brute-force quadrature: relative weight,
/// tail and apply deviations <= tol and exact weight symmetry.
CheckReport check_operator_oracle(const GridSpec& grid, const KernelSpec& kernel, const QuadratureConfig& quad,
                                  int fields, std::uint64_t seed, double tol = 1e-12);

/// int_{1<=|x|<=2} |x|^{-Q} = C0 log 2 (relative tol) and the (1,4)/(1,2)
/// ratio equals 2 (ratio_tol).
CheckReport check_annulus_identity(const GroupContext& ctx, double tol = 1e-4, double ratio_tol = 0.01);

struct ResolventContractOptions {
  int problems = 20;  // per exponent
  double epsilon = 0.5;
  double solve_tol = 1e-10;
  double sup_slack = 1e-10;
  double contraction_margin = -1e-8;
};

/// Random data g in [-1, 1]: residual <= solve_tol, |v^{1/m}|_inf <= |g|_inf
/// + sup_slack and T-contraction margin >= contraction_margin for each pair
/// of consecutive problems.
CheckReport check_resolvent_contract(const NonlocalOperator& op, const std::vector<double>& m_values,
                                     std::uint64_t seed, const ResolventContractOptions& opt = {});

/// Censored closure: relative mass drift per step <= tol.
CheckReport check_mass(const Trajectory& traj, Closure closure, double tol = 1e-10);

/// Dirichlet closure: fits log |mass(T) - mass(0)| against log R for runs at
/// the given exterior radii. For m > m* the slope must match mass_leak_slope
/// within rel_tol; at m = m* the drift must grow sub-linearly in time.
CheckReport check_mass_rate(const std::vector<Trajectory>& runs, const std::vector<double>& radii,
                            double rel_tol = 0.2);

struct ExtinctionOptions {
  double threshold = 1e-6;
  double horizon_factor = 2.0;
};

/// Requires m < m* and p > p*(m); otherwise the status is "skipped: m >= m*"
/// (the report still records whether the field fell below the threshold).
CheckReport check_extinction(const Trajectory& traj, double p, const ExtinctionOptions& opt = {});

/// Passes when |u|_inf stays above the extinction threshold for the whole run.
CheckReport check_no_extinction(const Trajectory& traj, double threshold = 1e-6);

struct ExponentReport {
  double fitted_exponent = 0.0;
  double predicted_exponent = 0.0;
  double t_min = 0.0;
  double t_max = 0.0;
  double r_squared = 0.0;
  std::size_t points = 0;
  bool pass = false;
  std::string status = "inconclusive";
  CheckReport report;
};

struct SmoothingOptions {
  double rel_tol = 0.15;
  double min_r_squared = 0.98;
  /// Window starts once |u|_inf has dropped to this fraction of its initial value...
  double start_fraction = 0.5;
  /// ...and spans this many decades of t (clipped to the run).
  double decades = 1.0;
};

/// Fits the slope of log |u|_inf against log t; predicted -gamma_p.
ExponentReport fit_smoothing(const Trajectory& traj, double p, const SmoothingOptions& opt = {});

/// log(|u_B(t)|_inf / |u_A(t)|_inf) / log(|u_B(0)|_p / |u_A(0)|_p) at the
/// last shared time; the smoothing estimate predicts delta_p at large t.
CheckReport data_scaling_exponent(const Trajectory& a, const Trajectory& b, double p);

/// Positive part and L1 distance between two runs are non-increasing up to
/// tol per step. Throws std::invalid_argument on mismatched schedules.
CheckReport check_contraction(const Trajectory& a, const Trajectory& b, double tol = 1e-10);

/// Paired runs from u0 with dt and from lambda u0 with dt lambda^{-(m-1)}:
/// max_k |u~_k - lambda u_k|_inf <= 10 resolvent_tol (or `tol` when given).
CheckReport check_scaling(const EvolutionConfig& cfg, const DiscreteField& u0, double lambda,
                          std::optional<double> tol = std::nullopt);
CheckReport check_scaling(const NonlocalOperator& op, const EvolutionConfig& cfg, const DiscreteField& u0,
                          double lambda, std::optional<double> tol = std::nullopt);

/// |u_k|_p non-increasing for every recorded p (and p = inf) up to rel_tol.
CheckReport check_lp_decay(const Trajectory& traj, double rel_tol = 1e-10);

/// sum_k dt E(u_k^m, u_k^m) + |u_N|_{m+1}^{m+1}/(m+1) <= |u_0|_{m+1}^{m+1}/(m+1) + tol.
CheckReport check_energy_inequality(const Trajectory& traj, double tol = 1e-8);

/// |u_{k+1} - u_k|_1 / dt against 2 |u_0|_1 / (|m - 1| t_k) (1 + slack) for t_k >= t_min.
CheckReport check_time_derivative(const Trajectory& traj, double t_min, double slack = 0.2);

/// E(f^m, f) >= 4m/(m+1)^2 E(f^{(m+1)/2}, f^{(m+1)/2}) on random
/// nonnegative fields; the worst relative violation must stay below tol.
CheckReport check_stroock_varopoulos(const NonlocalOperator& op, const std::vector<double>& m_values, int fields,
                                     std::uint64_t seed, double tol = 1e-12);

}  // namespace nlfilt
