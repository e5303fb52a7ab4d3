#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace lipsyn::lmi {

/// constant + sum_k y[indices[k]] * coefficients[k]  <=  0  (negative semidefinite)
struct LinearMatrixInequality {
  Eigen::MatrixXd constant;
  std::vector<int> indices;
  std::vector<Eigen::MatrixXd> coefficients;

  int size() const { return static_cast<int>(constant.rows()); }
  Eigen::MatrixXd evaluate(const Eigen::VectorXd& y) const;
};

/// Standard form handed to a backend:
///
///   minimize    cost' y
///   subject to  F_j(y) <= 0  (each LMI),   A y + b <= 0  (componentwise)
struct ConicProblem {
  int num_variables = 0;
  Eigen::VectorXd cost;
  std::vector<LinearMatrixInequality> lmis;
  Eigen::MatrixXd lin_coeffs;  // rows x num_variables
  Eigen::VectorXd lin_constant;

  bool has_objective() const { return cost.size() > 0 && cost.cwiseAbs().maxCoeff() > 0.0; }
};

enum class BackendStatus { kOptimal, kFeasible, kInfeasible, kFailure };

struct BackendResult {
  BackendStatus status = BackendStatus::kFailure;
  Eigen::VectorXd y;
  int newton_steps = 0;
  std::string message;
};

struct BackendOptions {
  double gap_abs = 1e-10;
  double gap_rel = 1e-9;
  /// Accepted duality-gap bound when centering stops at rounding level,
  /// relative to 1 + |objective|.
  double stall_gap = 1e-7;
  int max_newton_steps = 800;
  double barrier_growth = 10.0;
  /// Every coordinate is confined to [-box_radius, box_radius] so that the
  /// barrier is bounded below on unbounded feasible sets.
  double box_radius = 1e8;
};

class SdpBackend {
 public:
  virtual ~SdpBackend() = default;
  /// `start` is a hint only; backends may ignore it.
  virtual BackendResult solve(const ConicProblem& problem,
                              const std::optional<Eigen::VectorXd>& start,
                              const BackendOptions& options) const = 0;
};

}  // namespace lipsyn::lmi
