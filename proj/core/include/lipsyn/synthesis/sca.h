#pragma once

#include <string>
#include <vector>

#include "lipsyn/lmi/lmi_problem.h"
#include "lipsyn/synthesis/types.h"
#include "lipsyn/system/lipschitz_system.h"

namespace lipsyn::synthesis {

/// Affine over-estimator of -(alpha I - Q)^2 around (alpha_t, Q_t):
///
///   (alpha_t^2 - 2 alpha_t alpha) I + 2 alpha_t Q + 2 alpha Q_t
///     + Q_t^2 - 2 alpha_t Q_t - Q_t Q - Q Q_t
///
/// `alpha` must be 1x1 and `Q` square.
lmi::MatrixExpr linearize_H(const lmi::MatrixExpr& alpha, const lmi::MatrixExpr& Q,
                            double alpha_t, const Eigen::MatrixXd& Q_t);
Eigen::MatrixXd linearize_H(double alpha, const Eigen::MatrixXd& Q, double alpha_t,
                            const Eigen::MatrixXd& Q_t);

/// Affine over-estimator of -(eps - w)^2 around (eps_t, w_t):
///
///   eps_t^2 + w_t^2 - 2 eps_t w_t - 2 eps (eps_t - w_t) - 2 w (w_t - eps_t)
lmi::MatrixExpr linearize_F(const lmi::MatrixExpr& epsilon, const lmi::MatrixExpr& w,
                            double eps_t, double w_t);
double linearize_F(double epsilon, double w, double eps_t, double w_t);

struct ScaBounds {
  double delta = 1e-7;
  double sigma = 1e-6;
  double kappa_max = 1e4;
};

/// Convex subproblem at a linearization point, with handles to its variables.
struct ScaProblem {
  lmi::LmiProblem problem;
  lmi::Variable Q, K, kappa, epsilon, alpha, t, w;
  int block_size = 0;  // size of the main block LMI

  /// Reads an iterate out of a solution of `problem`.
  ScaIterate extract(const lmi::Assignment& a) const;
  /// Assignment for warm-starting `problem` at `it`.
  lmi::Assignment assignment(const ScaIterate& it) const;
};

/// Throws std::invalid_argument when `prev.Q` is not positive definite.
ScaProblem build_sca_lmi(const system::LipschitzSystem& sys, const ScaIterate& prev,
                         const ScaBounds& bounds = {});

struct ScaHistoryEntry {
  int k = 0;
  ScaIterate iterate;
};

struct ScaResult {
  Eigen::MatrixXd K;
  ScaIterate final_iterate;
  FeasibilityCertificate certificate;
  /// k = 0 is the Step-2 starting point; every entry passed check_theorem1.
  std::vector<ScaHistoryEntry> history;
  Step1Result step1;
  Step2Result step2;
  double step1_alpha = 0.0;
  bool converged = false;  // |t_k - t_{k-1}| < tol reached
  bool warning = false;    // loop stopped early; best-so-far returned
  std::string warning_message;
};

/// Step 1 / Step 2 initialization over the retry schedule followed by the
/// successive convex approximation loop. Throws InfeasibleInitialization
/// when no retry combination yields a starting point.
ScaResult run_sca(const system::LipschitzSystem& sys, const SynthesisConfig& config);

}  // namespace lipsyn::synthesis
