#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "lipsyn/lmi/conic_problem.h"
#include "lipsyn/lmi/matrix_expr.h"

namespace lipsyn::lmi {

/// kNsd: expr <= -margin * I.  kPsd: expr >= margin * I.
enum class Sense { kNsd, kPsd };

struct Constraint {
  MatrixExpr expr;
  Sense sense = Sense::kNsd;
  double margin = 0.0;
  std::string label;
};

struct VariableInfo {
  Variable variable;
  std::string name;
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
  int offset = 0;  // first coordinate in the stacked vector
};

/// Margin used for strict inequalities: delta * (1 + max-abs constant entry).
double default_margin(const MatrixExpr& expr, double delta = 1e-7);

class LmiProblem {
 public:
  static constexpr double kUnbounded = std::numeric_limits<double>::infinity();

  Variable add_scalar(std::string name, double lower = -kUnbounded,
                      double upper = kUnbounded);
  Variable add_symmetric(std::string name, int n);
  Variable add_matrix(std::string name, int rows, int cols);

  /// Throws std::invalid_argument unless `expr` is square and symmetric and
  /// every variable in it belongs to this problem.
  void add_lmi(MatrixExpr expr, Sense sense, double margin, std::string label = {});

  /// Adds `weight * v` to the (minimized) objective. `v` must be scalar.
  void minimize(const Variable& v, double weight = 1.0);

  const std::vector<VariableInfo>& variables() const { return variables_; }
  const std::vector<Constraint>& constraints() const { return constraints_; }
  bool has_objective() const { return !objective_.empty(); }
  int num_coordinates() const { return num_coordinates_; }

  double objective_value(const Assignment& a) const;

  ConicProblem compile() const;
  Eigen::VectorXd stack(const Assignment& a) const;
  Assignment unstack(const Eigen::VectorXd& y) const;

 private:
  const VariableInfo& info(const Variable& v) const;

  std::vector<VariableInfo> variables_;
  std::vector<Constraint> constraints_;
  std::vector<std::pair<Variable, double>> objective_;
  int num_coordinates_ = 0;
};

enum class SolveStatus { kOptimal, kFeasible, kInfeasible, kNumericalFailure };

const char* to_string(SolveStatus s);

struct LmiSolution {
  SolveStatus status = SolveStatus::kNumericalFailure;
  Assignment assignment;
  std::optional<double> objective;
  /// Largest re-verified residual lambda_max(+-expr) + margin over all
  /// constraints, and the label of the constraint attaining it.
  double max_residual = std::numeric_limits<double>::infinity();
  std::string worst_constraint;
  std::string message;

  bool ok() const {
    return status == SolveStatus::kOptimal || status == SolveStatus::kFeasible;
  }
};

struct SolveOptions {
  /// Warm start; variables missing from it start at zero.
  std::optional<Assignment> initial_guess;
  /// Tolerance of the post-solve eigenvalue verification.
  double verify_tol = 1e-7;
  BackendOptions backend;
};

/// Solves with the bundled barrier backend, then re-verifies every
/// constraint by dense eigendecomposition. A point that fails verification
/// is reported as kNumericalFailure.
LmiSolution solve(const LmiProblem& problem, const SolveOptions& options = {});
LmiSolution solve(const LmiProblem& problem, const SdpBackend& backend,
                  const SolveOptions& options);

}  // namespace lipsyn::lmi
