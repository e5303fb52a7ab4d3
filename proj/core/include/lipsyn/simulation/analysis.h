#pragma once

#include <vector>

#include <Eigen/Dense>

#include "lipsyn/simulation/simulate.h"
#include "lipsyn/system/lipschitz_system.h"

namespace lipsyn::simulation {

/// V[k] = (x[k] - x_eq)' Q (x[k] - x_eq). Throws std::invalid_argument when
/// Q is not symmetric, DimensionError on shape mismatch.
std::vector<double> lyapunov_sequence(const Trajectory& traj, const Eigen::MatrixXd& Q,
                                      const Eigen::VectorXd& x_eq);

struct EquilibriumOptions {
  double tail_fraction = 0.1;
  double variance_threshold = 1e-10;
};

/// Mean of the last tail_fraction of the states, with u_eq the mean of the
/// matching inputs and the fixed-point residual of `sys` at (x_eq, u_eq).
/// Throws NotConvergedError when any channel's tail variance exceeds the
/// threshold.
system::EquilibriumInfo estimate_equilibrium(const system::LipschitzSystem& sys,
                                             const Trajectory& traj,
                                             const EquilibriumOptions& options = {});

/// ||e[k]|| ~ prefactor * rate^k * ||e[0]||, fitted by least squares on
/// log ||e[k]|| over the leading samples with ||e[k]|| > 1e-9.
struct DecayFit {
  double rate = 0.0;
  double prefactor = 0.0;
  /// Largest amount by which a fitted sample exceeds the envelope.
  double max_violation = 0.0;
  int samples = 0;
  /// Error sequence identically zero; rate is 0 by convention.
  bool degenerate = false;
};

/// Throws std::invalid_argument when e[0] = 0 but later errors are not.
DecayFit fit_exponential_decay(const Trajectory& traj, const Eigen::VectorXd& x_eq);

/// Per-sample error norms ||x[k] - x_eq||_2.
Eigen::VectorXd error_norms(const Trajectory& traj, const Eigen::VectorXd& x_eq);

/// True when the local maxima of |v[k]| for k >= start never rise by more
/// than rel_tol times the largest of them (plus abs_tol).
bool peaks_nonincreasing(const Eigen::VectorXd& v, int start, double rel_tol = 1e-6,
                         double abs_tol = 1e-12);

}  // namespace lipsyn::simulation
