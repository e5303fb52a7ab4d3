#pragma once

#include <optional>

#include "lipsyn/synthesis/types.h"
#include "lipsyn/system/lipschitz_system.h"

namespace lipsyn::synthesis {

/// Minimizes nu subject to
///
///   [[(alpha-1) X, A X - B Z], [*, -X]] - nu I < 0,   X > 0,   rho <= nu < 0.
///
/// The block is homogeneous in (X, Z), so the problem is solved with
/// X <= I and the minimizer is scaled until nu = rho. Throws
/// InfeasibleInitialization when no stabilizing linear gain exists at this
/// alpha, std::invalid_argument on bad alpha / rho.
Step1Result step1_initial_lyapunov(const system::LipschitzSystem& sys, double alpha,
                                   double rho, double delta = 1e-7);

/// Finds (K, epsilon, alpha) with Q0 and kappa fixed such that the
/// stability block is negative definite and ||K||_2 <= kappa. Returns
/// nullopt when infeasible. Throws std::invalid_argument for kappa <= 0 or
/// a Q0 that is not positive definite.
std::optional<Step2Result> step2_initial_gain(const system::LipschitzSystem& sys,
                                              const Eigen::MatrixXd& Q0, double kappa,
                                              double delta = 1e-7);

}  // namespace lipsyn::synthesis
