#pragma once

// Resolvent problem  v^{1/m} + eps L v = g,  v^{1/m} := sign(v)|v|^{1/m},
// the Euler-Lagrange equation of the strictly convex functional
//   F(v) = eps/2 E(v, v) + sum m/(m+1) |v_i|^{1/m+1} cellvol - sum v_i g_i cellvol.

#include <stdexcept>
#include <string>
#include <utility>

#include "nlfilt/grid.hpp"
#include "nlfilt/nonlocal_operator.hpp"

namespace nlfilt {

enum class ResolventMethod {
  /// Damped Newton on the strong-form residual; falls back to descent steps
  /// when the line search stalls.
  newton,
  /// Diagonally preconditioned gradient descent with backtracking on F.
  descent,
};

struct ResolventProblem {
  const NonlocalOperator& op;
  DiscreteField g;
  double m = 1.0;
  double epsilon = 1.0;
  double tol = 1e-10;
  int max_iters = 200;
  ResolventMethod method = ResolventMethod::newton;

  /// Throws std::invalid_argument on m, epsilon, tol <= 0 or a grid mismatch.
  void validate() const;
};

struct SolverReport {
  int iterations = 0;
  double final_residual_inf = 0.0;
  double functional_value = 0.0;
  bool converged = false;
  int linear_iterations = 0;
  int descent_steps = 0;
};

struct NumericalFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

double functional(const ResolventProblem& prob, const DiscreteField& v);

/// r_i = v_i^{1/m} + eps (L v)_i - g_i.
DiscreteField gradient(const ResolventProblem& prob, const DiscreteField& v);

/// Returns v with |r|_inf <= tol when converged. Non-convergence is reported
/// through SolverReport::converged; NaN iterates throw NumericalFailure.
std::pair<DiscreteField, SolverReport> solve(const ResolventProblem& prob);

struct ContractionCheck {
  double lhs = 0.0;  // sum (v1^{1/m} - v2^{1/m})_+ cellvol
  double rhs = 0.0;  // sum (g1 - g2)_+ cellvol
  double margin = 0.0;  // rhs + tol - lhs
  bool holds = false;
  /// When g1 >= g2 everywhere: max_i (v2_i - v1_i), which order
  /// preservation keeps <= 0 up to solver tolerance.
  bool ordered_data = false;
  double order_violation = 0.0;
  SolverReport report1;
  SolverReport report2;
};

ContractionCheck t_contraction_check(const NonlocalOperator& op, const DiscreteField& g1,
                                     const DiscreteField& g2, double m, double epsilon, double tol);

}  // namespace nlfilt
