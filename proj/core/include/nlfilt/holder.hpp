#pragma once

// Oscillation decay over nested space-time cylinders
//   Q_k = {kdist(x, x0) <= r_base R^{-k}} x [t0 - tau R^{-k alpha}, t0].
// With degenerate cylinders the time depth becomes
//   tau R^{-k alpha} (omega_{k-1} / omega_0)^{-sigma},  sigma = 1 - 1/m,
// capped by the previous depth so that the cylinders stay nested.

#include <optional>
#include <vector>

#include "nlfilt/evolution.hpp"
#include "nlfilt/hgroup.hpp"
#include "nlfilt/report.hpp"

namespace nlfilt {

struct CylinderSpec {
  GroupPoint center;
  double t0 = 0.0;
  double radius = 1.0;  // Koranyi radius
  double depth = 1.0;   // time depth a
};

struct HolderOptions {
  double R = 2.0;
  int depth = 3;
  bool degenerate = false;
  double r_base = 1.0;
  /// Time depth of Q_0; defaults to r_base^alpha.
  std::optional<double> tau;
  /// Oscillations below this end the sequence (resolution floor).
  double floor = 1e-9;
  /// Reference sample pattern: lattice spacing inside the unit ball.
  double pattern_spacing = 0.125;
};

struct HolderReport {
  std::vector<double> omega;
  std::vector<double> ratios;
  std::vector<CylinderSpec> cylinders;
  double theta_hat = 0.0;
  double beta_hat = 0.0;
  bool flat = false;
  int levels_used = 0;
  CheckReport report;
};

/// Half the oscillation of the trajectory over a cylinder. Spatial values come
/// from multilinear interpolation, temporal values from linear interpolation
/// between stored fields. Returns false if the cylinder leaves the stored
/// space-time domain.
bool cylinder_half_oscillation(const Trajectory& traj, const CylinderSpec& cyl, double pattern_spacing,
                               double& omega);

HolderReport holder_diagnostic(const Trajectory& traj, const GroupPoint& center, double t0,
                               const HolderOptions& opt = {});

}  // namespace nlfilt
