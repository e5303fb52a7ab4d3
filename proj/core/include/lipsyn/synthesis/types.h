#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace lipsyn::synthesis {

/// [k0, 2 k0, 5 k0, 10 k0, 40 k0]
std::vector<double> default_kappa_schedule(double kappa0);

struct SynthesisConfig {
  double alpha_init = 1e-2;
  double rho = -20.0;
  double kappa0 = 10.0;
  double eps_small = 0.01;  // offset in w0 = (gamma_x + gamma_u kappa0)^2 + eps_small
  double tol = 1e-6;
  int max_iter = 50;
  std::vector<double> kappa_retry_schedule = default_kappa_schedule(10.0);
  double delta = 1e-7;  // strictness margin scale
  double sigma = 1e-6;  // Q >= sigma I

  /// Throws std::invalid_argument naming the first offending field.
  void validate() const;
};

/// One state of the successive convex approximation.
struct ScaIterate {
  Eigen::MatrixXd Q;
  Eigen::MatrixXd K;
  double epsilon = 0.0;
  double alpha = 0.0;
  double kappa = 0.0;
  double w = 0.0;
  double t = 0.0;

  /// Throws std::invalid_argument unless Q > 0, Q <= t I, ||K||_2 <= kappa
  /// and (gamma_x + gamma_u kappa)^2 <= w, each within `slack`.
  void validate(double gamma_x, double gamma_u, double slack = 1e-9) const;
};

struct ScalarChecks {
  bool alpha_in_range = false;  // 0 < alpha < 1
  bool epsilon_nonnegative = false;
  bool kappa_positive = false;
  bool q_positive_definite = false;

  bool all() const {
    return alpha_in_range && epsilon_nonnegative && kappa_positive && q_positive_definite;
  }
};

/// Numerical evidence that a candidate (Q, K, epsilon, kappa, alpha)
/// satisfies the stability conditions.
struct FeasibilityCertificate {
  Eigen::VectorXd lhs_eigs;  // ascending
  double norm_gap = 0.0;     // kappa - ||K||_2
  ScalarChecks scalar_checks;
  double margin = 0.0;  // max(lhs_eigs) must stay below -margin

  double max_eig() const { return lhs_eigs.size() ? lhs_eigs.maxCoeff() : 0.0; }
  bool valid() const;
  std::string summary() const;
};

struct Step1Result {
  Eigen::MatrixXd X;
  Eigen::MatrixXd Z;
  double nu = 0.0;

  /// X^{-1}
  Eigen::MatrixXd Q0() const;
  /// Z X^{-1}
  Eigen::MatrixXd K0() const;
};

struct Step2Result {
  Eigen::MatrixXd K;
  double epsilon = 0.0;
  double alpha = 0.0;
  double kappa = 0.0;
  FeasibilityCertificate certificate;
};

}  // namespace lipsyn::synthesis
