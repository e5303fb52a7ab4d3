#pragma once

#include <Eigen/Dense>

#include "lipsyn/system/lipschitz_system.h"

namespace lipsyn::simulation {

/// Row k of `states` and `outputs` is sample k (time kT); row k of `inputs`
/// is the input applied between samples k and k+1.
struct Trajectory {
  Eigen::MatrixXd states;   // (N+1) x n
  Eigen::MatrixXd inputs;   // N x m
  Eigen::MatrixXd outputs;  // (N+1) x p
  /// Set by simulate_tracking; empty otherwise.
  Eigen::VectorXd reference;

  int steps() const { return static_cast<int>(inputs.rows()); }
  Eigen::VectorXd state(int k) const { return states.row(k).transpose(); }
  Eigen::VectorXd final_state() const { return state(steps()); }
};

/// Rollouts abort once ||x[k]||_2 exceeds this.
inline constexpr double kDivergenceBound = 1e9;

/// x[k+1] = A x[k] + G f(x[k], u[k]) + B u[k] with u[k] = -K x[k].
/// Throws DimensionError on shape mismatch, std::invalid_argument for
/// N < 1, DivergenceError on a non-finite or runaway state.
Trajectory simulate_closed_loop(const system::LipschitzSystem& sys, const Eigen::MatrixXd& K,
                                const Eigen::VectorXd& x0, int N);

/// Closed-loop rollout of the augmented plant. `x0` holds either the plant
/// state (integrator starts at 0) or the full augmented state. Outputs are
/// C x, the tracked channel, and `reference` is r.
Trajectory simulate_tracking(const system::AugmentedSystem& aug, const Eigen::MatrixXd& K,
                             const Eigen::VectorXd& x0, int N);

}  // namespace lipsyn::simulation
