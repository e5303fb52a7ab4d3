#include "lipsyn/lmi/lmi_problem.h"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "lipsyn/lmi/barrier_backend.h"
#include "lipsyn/lmi/linalg.h"

namespace lipsyn::lmi {

double default_margin(const MatrixExpr& expr, double delta) {
  return delta * (1.0 + max_abs(expr.constant_part()));
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::kOptimal:
      return "optimal";
    case SolveStatus::kFeasible:
      return "feasible";
    case SolveStatus::kInfeasible:
      return "infeasible";
    case SolveStatus::kNumericalFailure:
      return "numerical-failure";
  }
  return "unknown";
}

Variable LmiProblem::add_scalar(std::string name, double lower, double upper) {
  if (!(lower <= upper)) {
    throw std::invalid_argument("add_scalar: empty bound interval for " + name);
  }
  Variable v{static_cast<int>(variables_.size()), VariableKind::kScalar, 1, 1};
  variables_.push_back({v, std::move(name), lower, upper, num_coordinates_});
  num_coordinates_ += 1;
  return v;
}

Variable LmiProblem::add_symmetric(std::string name, int n) {
  if (n <= 0) throw std::invalid_argument("add_symmetric: size must be positive");
  Variable v{static_cast<int>(variables_.size()), VariableKind::kSymmetric, n, n};
  variables_.push_back({v, std::move(name), -kUnbounded, kUnbounded, num_coordinates_});
  num_coordinates_ += v.num_coordinates();
  return v;
}

Variable LmiProblem::add_matrix(std::string name, int rows, int cols) {
  if (rows <= 0 || cols <= 0) {
    throw std::invalid_argument("add_matrix: shape must be positive");
  }
  Variable v{static_cast<int>(variables_.size()), VariableKind::kRectangular, rows, cols};
  variables_.push_back({v, std::move(name), -kUnbounded, kUnbounded, num_coordinates_});
  num_coordinates_ += v.num_coordinates();
  return v;
}

const VariableInfo& LmiProblem::info(const Variable& v) const {
  if (v.id < 0 || v.id >= static_cast<int>(variables_.size())) {
    throw std::invalid_argument("variable " + std::to_string(v.id) +
                                " does not belong to this problem");
  }
  const VariableInfo& vi = variables_[v.id];
  if (vi.variable.kind != v.kind || vi.variable.rows != v.rows ||
      vi.variable.cols != v.cols) {
    throw std::invalid_argument("variable handle " + std::to_string(v.id) +
                                " does not match its declaration");
  }
  return vi;
}

void LmiProblem::add_lmi(MatrixExpr expr, Sense sense, double margin, std::string label) {
  if (expr.rows() != expr.cols() || expr.rows() == 0) {
    throw std::invalid_argument("add_lmi(" + label + "): expression is " +
                                std::to_string(expr.rows()) + "x" +
                                std::to_string(expr.cols()) + ", not square");
  }
  if (!expr.is_symmetric()) {
    throw std::invalid_argument("add_lmi(" + label + "): expression is not symmetric");
  }
  if (margin < 0.0) throw std::invalid_argument("add_lmi: negative margin");
  for (const Variable& v : expr.variables()) info(v);
  if (label.empty()) label = "lmi" + std::to_string(constraints_.size());
  constraints_.push_back({std::move(expr), sense, margin, std::move(label)});
}

void LmiProblem::minimize(const Variable& v, double weight) {
  info(v);
  if (v.kind != VariableKind::kScalar) {
    throw std::invalid_argument("minimize: objective must be over scalar variables");
  }
  objective_.emplace_back(v, weight);
}

double LmiProblem::objective_value(const Assignment& a) const {
  double out = 0.0;
  for (const auto& [v, w] : objective_) out += w * a.scalar(v);
  return out;
}

ConicProblem LmiProblem::compile() const {
  ConicProblem p;
  p.num_variables = num_coordinates_;
  p.cost = Eigen::VectorXd::Zero(num_coordinates_);
  for (const auto& [v, w] : objective_) p.cost(info(v).offset) += w;

  for (const Constraint& c : constraints_) {
    const double sign = c.sense == Sense::kNsd ? 1.0 : -1.0;
    const int k = c.expr.rows();
    LinearMatrixInequality lmi;
    lmi.constant = symmetrize(sign * c.expr.constant_part()) +
                   c.margin * Eigen::MatrixXd::Identity(k, k);
    for (const Variable& v : c.expr.variables()) {
      const int offset = info(v).offset;
      const std::vector<Eigen::MatrixXd> coeffs = c.expr.coefficients(v);
      for (size_t i = 0; i < coeffs.size(); ++i) {
        if (max_abs(coeffs[i]) == 0.0) continue;
        lmi.indices.push_back(offset + static_cast<int>(i));
        lmi.coefficients.push_back(symmetrize(sign * coeffs[i]));
      }
    }
    p.lmis.push_back(std::move(lmi));
  }

  std::vector<std::pair<int, double>> rows;  // (coordinate, +1 upper / -1 lower)
  std::vector<double> bounds;
  for (const VariableInfo& vi : variables_) {
    if (std::isfinite(vi.upper)) {
      rows.emplace_back(vi.offset, 1.0);
      bounds.push_back(-vi.upper);
    }
    if (std::isfinite(vi.lower)) {
      rows.emplace_back(vi.offset, -1.0);
      bounds.push_back(vi.lower);
    }
  }
  p.lin_coeffs = Eigen::MatrixXd::Zero(static_cast<int>(rows.size()), num_coordinates_);
  p.lin_constant = Eigen::VectorXd::Zero(static_cast<int>(rows.size()));
  for (size_t r = 0; r < rows.size(); ++r) {
    p.lin_coeffs(static_cast<int>(r), rows[r].first) = rows[r].second;
    p.lin_constant(static_cast<int>(r)) = bounds[r];
  }
  return p;
}

Eigen::VectorXd LmiProblem::stack(const Assignment& a) const {
  Eigen::VectorXd y = Eigen::VectorXd::Zero(num_coordinates_);
  for (const VariableInfo& vi : variables_) {
    if (!a.contains(vi.variable.id)) continue;
    const Eigen::MatrixXd& m = a.at(vi.variable.id);
    int c = vi.offset;
    switch (vi.variable.kind) {
      case VariableKind::kScalar:
        y(c) = m(0, 0);
        break;
      case VariableKind::kSymmetric:
        for (int i = 0; i < m.rows(); ++i)
          for (int j = i; j < m.cols(); ++j) y(c++) = 0.5 * (m(i, j) + m(j, i));
        break;
      case VariableKind::kRectangular:
        for (int i = 0; i < m.rows(); ++i)
          for (int j = 0; j < m.cols(); ++j) y(c++) = m(i, j);
        break;
    }
  }
  return y;
}

Assignment LmiProblem::unstack(const Eigen::VectorXd& y) const {
  Assignment a;
  for (const VariableInfo& vi : variables_) {
    const Variable& v = vi.variable;
    Eigen::MatrixXd m(v.rows, v.cols);
    int c = vi.offset;
    switch (v.kind) {
      case VariableKind::kScalar:
        m(0, 0) = y(c);
        break;
      case VariableKind::kSymmetric:
        for (int i = 0; i < v.rows; ++i)
          for (int j = i; j < v.cols; ++j) m(i, j) = m(j, i) = y(c++);
        break;
      case VariableKind::kRectangular:
        for (int i = 0; i < v.rows; ++i)
          for (int j = 0; j < v.cols; ++j) m(i, j) = y(c++);
        break;
    }
    a.set(v, std::move(m));
  }
  return a;
}

namespace {

void verify(const LmiProblem& problem, double tol, LmiSolution& sol) {
  sol.max_residual = -std::numeric_limits<double>::infinity();
  for (const Constraint& c : problem.constraints()) {
    const double sign = c.sense == Sense::kNsd ? 1.0 : -1.0;
    const Eigen::MatrixXd m = symmetrize(sign * c.expr.evaluate(sol.assignment));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    const double r = es.eigenvalues().maxCoeff() + c.margin;
    if (!(r <= sol.max_residual)) {
      sol.max_residual = r;
      sol.worst_constraint = c.label;
    }
  }
  for (const VariableInfo& vi : problem.variables()) {
    if (vi.variable.kind != VariableKind::kScalar) continue;
    const double v = sol.assignment.scalar(vi.variable);
    const double r = std::max(v - vi.upper, vi.lower - v);
    if (!(r <= sol.max_residual)) {
      sol.max_residual = r;
      sol.worst_constraint = vi.name + " bounds";
    }
  }
  if (!(sol.max_residual <= tol)) {
    std::ostringstream os;
    os << "post-solve verification failed: constraint '" << sol.worst_constraint
       << "' has residual " << sol.max_residual << " > " << tol << " (backend said: "
       << sol.message << ")";
    sol.message = os.str();
    sol.status = SolveStatus::kNumericalFailure;
  }
}

}  // namespace

LmiSolution solve(const LmiProblem& problem, const SolveOptions& options) {
  return solve(problem, BarrierBackend{}, options);
}

LmiSolution solve(const LmiProblem& problem, const SdpBackend& backend,
                  const SolveOptions& options) {
  LmiSolution sol;
  ConicProblem conic;
  try {
    conic = problem.compile();
  } catch (const std::exception& e) {
    sol.message = std::string("compile failed: ") + e.what();
    return sol;
  }
  std::optional<Eigen::VectorXd> start;
  if (options.initial_guess) start = problem.stack(*options.initial_guess);

  const BackendResult br = backend.solve(conic, start, options.backend);
  sol.message = br.message;
  switch (br.status) {
    case BackendStatus::kOptimal:
      sol.status = SolveStatus::kOptimal;
      break;
    case BackendStatus::kFeasible:
      sol.status = SolveStatus::kFeasible;
      break;
    case BackendStatus::kInfeasible:
      sol.status = SolveStatus::kInfeasible;
      return sol;
    case BackendStatus::kFailure:
      sol.status = SolveStatus::kNumericalFailure;
      return sol;
  }
  if (br.y.size() != problem.num_coordinates() || !br.y.allFinite()) {
    sol.status = SolveStatus::kNumericalFailure;
    sol.message = "backend returned a malformed point";
    return sol;
  }
  sol.assignment = problem.unstack(br.y);
  if (problem.has_objective()) sol.objective = problem.objective_value(sol.assignment);
  verify(problem, options.verify_tol, sol);
  return sol;
}

}  // namespace lipsyn::lmi
