#pragma once

#include "lipsyn/synthesis/types.h"
#include "lipsyn/system/lipschitz_system.h"

namespace lipsyn::synthesis {

/// [[(alpha-1)Q + eps*gk^2 I, 0,     (A-BK)^T],
///  [0,                      -eps I, G^T     ],
///  [A-BK,                   G,      -Q^{-1} ]],   gk = gamma_x + gamma_u kappa.
/// Throws std::invalid_argument when Q is singular.
Eigen::MatrixXd theorem1_matrix(const system::LipschitzSystem& sys, const Eigen::MatrixXd& Q,
                                const Eigen::MatrixXd& K, double epsilon, double kappa,
                                double alpha);

/// Evaluates the stability conditions at a candidate point by dense
/// eigendecomposition. `margin` > 0 tightens and < 0 relaxes the checks:
/// the certificate is valid iff lambda_max < -margin,
/// kappa - ||K||_2 >= min(0, margin) and the scalar checks pass.
FeasibilityCertificate check_theorem1(const system::LipschitzSystem& sys,
                                      const Eigen::MatrixXd& Q, const Eigen::MatrixXd& K,
                                      double epsilon, double kappa, double alpha,
                                      double margin = 0.0);

}  // namespace lipsyn::synthesis
