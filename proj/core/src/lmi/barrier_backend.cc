#include "lipsyn/lmi/barrier_backend.h"

#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include <spdlog/spdlog.h>

namespace lipsyn::lmi {

Eigen::MatrixXd LinearMatrixInequality::evaluate(const Eigen::VectorXd& y) const {
  Eigen::MatrixXd f = constant;
  for (size_t k = 0; k < indices.size(); ++k) f += y(indices[k]) * coefficients[k];
  return f;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double barrier_parameter(const ConicProblem& p) {
  double theta = static_cast<double>(p.lin_constant.size());
  for (const auto& lmi : p.lmis) theta += lmi.size();
  return theta;
}

// -sum log det(-F_j(y)) - sum log(-(a_r y + b_r)), or +inf outside the domain.
double barrier_value(const ConicProblem& p, const Eigen::VectorXd& y) {
  double phi = 0.0;
  for (const auto& lmi : p.lmis) {
    Eigen::LLT<Eigen::MatrixXd> llt(-lmi.evaluate(y));
    if (llt.info() != Eigen::Success) return kInf;
    const Eigen::VectorXd d = llt.matrixLLT().diagonal();
    if ((d.array() <= 0.0).any()) return kInf;
    phi -= 2.0 * d.array().log().sum();
  }
  if (p.lin_constant.size() > 0) {
    const Eigen::VectorXd r = -(p.lin_coeffs * y + p.lin_constant);
    if ((r.array() <= 0.0).any()) return kInf;
    phi -= r.array().log().sum();
  }
  return std::isfinite(phi) ? phi : kInf;
}

bool strictly_feasible(const ConicProblem& p, const Eigen::VectorXd& y) {
  return std::isfinite(barrier_value(p, y));
}

// Largest constraint value: max over LMIs of lambda_max(F_j(y)) and rows.
double max_violation(const ConicProblem& p, const Eigen::VectorXd& y) {
  double worst = -kInf;
  for (const auto& lmi : p.lmis) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(lmi.evaluate(y),
                                                      Eigen::EigenvaluesOnly);
    worst = std::max(worst, es.eigenvalues().maxCoeff());
  }
  if (p.lin_constant.size() > 0) {
    worst = std::max(worst, (p.lin_coeffs * y + p.lin_constant).maxCoeff());
  }
  return worst;
}

// Gradient and Hessian of the barrier at a strictly feasible y.
void barrier_derivatives(const ConicProblem& p, const Eigen::VectorXd& y,
                         Eigen::VectorXd& grad, Eigen::MatrixXd& hess) {
  const int n = p.num_variables;
  grad.setZero(n);
  hess.setZero(n, n);
  std::vector<Eigen::MatrixXd> g;
  for (const auto& lmi : p.lmis) {
    Eigen::LLT<Eigen::MatrixXd> llt(-lmi.evaluate(y));
    const auto lower = llt.matrixL();
    const size_t nk = lmi.indices.size();
    g.resize(nk);
    for (size_t k = 0; k < nk; ++k) {
      Eigen::MatrixXd a = lower.solve(lmi.coefficients[k]);
      g[k] = lower.solve(Eigen::MatrixXd(a.transpose()));
      grad(lmi.indices[k]) += g[k].trace();
    }
    for (size_t i = 0; i < nk; ++i) {
      for (size_t k = i; k < nk; ++k) {
        const double v = g[i].cwiseProduct(g[k]).sum();
        hess(lmi.indices[i], lmi.indices[k]) += v;
        if (k != i) hess(lmi.indices[k], lmi.indices[i]) += v;
      }
    }
  }
  if (p.lin_constant.size() > 0) {
    const Eigen::VectorXd r = -(p.lin_coeffs * y + p.lin_constant);
    const Eigen::VectorXd inv = r.cwiseInverse();
    grad += p.lin_coeffs.transpose() * inv;
    const Eigen::MatrixXd scaled = inv.asDiagonal() * p.lin_coeffs;
    hess += scaled.transpose() * scaled;
  }
}

// Solves H x = rhs with Jacobi scaling, adding diagonal regularization if
// the scaled matrix is not numerically positive definite.
Eigen::VectorXd newton_solve(const Eigen::MatrixXd& h, const Eigen::VectorXd& rhs) {
  const int n = static_cast<int>(h.rows());
  const double diag_max = h.diagonal().cwiseAbs().maxCoeff();
  Eigen::VectorXd d(n);
  for (int i = 0; i < n; ++i) {
    const double v = h(i, i);
    d(i) = v > 1e-300 * std::max(1.0, diag_max) ? 1.0 / std::sqrt(v) : 1.0;
  }
  const Eigen::MatrixXd hs = d.asDiagonal() * h * d.asDiagonal();
  const Eigen::VectorXd bs = d.cwiseProduct(rhs);
  for (double reg = 0.0; reg < 1.0; reg = reg == 0.0 ? 1e-14 : reg * 100.0) {
    Eigen::LLT<Eigen::MatrixXd> llt(hs + reg * Eigen::MatrixXd::Identity(n, n));
    if (llt.info() == Eigen::Success) {
      Eigen::VectorXd x = llt.solve(bs);
      if (x.allFinite()) return d.cwiseProduct(x);
    }
  }
  Eigen::LDLT<Eigen::MatrixXd> ldlt(hs);
  return d.cwiseProduct(ldlt.solve(bs));
}

enum class CenterOutcome { kConverged, kStopped, kStalled, kBudget };

using StopPredicate = std::function<bool(const Eigen::VectorXd&)>;

// Minimizes t c'y + phi(y) by damped Newton with backtracking.
CenterOutcome center(const ConicProblem& p, Eigen::VectorXd& y, double t,
                     int& budget, const StopPredicate& stop) {
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess;
  const bool has_cost = p.cost.size() == p.num_variables;
  auto objective = [&](const Eigen::VectorXd& v) {
    const double phi = barrier_value(p, v);
    if (!std::isfinite(phi)) return kInf;
    return (has_cost ? t * p.cost.dot(v) : 0.0) + phi;
  };
  double fy = objective(y);
  int flat_steps = 0;
  while (budget > 0) {
    --budget;
    barrier_derivatives(p, y, grad, hess);
    if (has_cost) grad += t * p.cost;
    const Eigen::VectorXd dy = newton_solve(hess, -grad);
    const double slope = grad.dot(dy);
    if (!std::isfinite(slope)) return CenterOutcome::kStalled;
    // Decrement measured against the rounding level of the merit value.
    if (-slope / 2.0 <= std::max(1e-10, 1e-13 * std::abs(fy))) return CenterOutcome::kConverged;

    double step = 1.0;
    double fnew = objective(y + dy);
    int halvings = 0;
    while (!(fnew <= fy + 0.01 * step * slope) && halvings < 80) {
      step *= 0.5;
      fnew = objective(y + step * dy);
      ++halvings;
    }
    if (!(fnew <= fy + 0.01 * step * slope)) {
      return CenterOutcome::kStalled;
    }
    y += step * dy;
    flat_steps = fy - fnew <= 1e-13 * std::max(1.0, std::abs(fy)) ? flat_steps + 1 : 0;
    fy = fnew;
    if (flat_steps >= 5) return CenterOutcome::kStalled;
    if (stop && stop(y)) return CenterOutcome::kStopped;
  }
  return CenterOutcome::kBudget;
}

// Barrier weight minimizing the Newton decrement at y.
double initial_weight(const ConicProblem& p, const Eigen::VectorXd& y) {
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess;
  barrier_derivatives(p, y, grad, hess);
  const Eigen::VectorXd hc = newton_solve(hess, p.cost);
  const double denom = p.cost.dot(hc);
  const double t0 = -grad.dot(hc) / denom;
  if (!std::isfinite(t0) || t0 <= 0.0) return 1.0;
  return std::clamp(t0, 1e-8, 1e8);
}

struct PhaseOneResult {
  bool feasible = false;
  bool certain = true;
  Eigen::VectorXd y;
  double best_s = kInf;
};

PhaseOneResult phase_one(const ConicProblem& p, Eigen::VectorXd y0,
                         const BackendOptions& options, int& budget) {
  const int n = p.num_variables;
  const double s0 = max_violation(p, y0);
  ConicProblem aux;
  aux.num_variables = n + 1;
  aux.cost = Eigen::VectorXd::Zero(n + 1);
  aux.cost(n) = 1.0;
  for (const auto& lmi : p.lmis) {
    LinearMatrixInequality l = lmi;
    l.indices.push_back(n);
    l.coefficients.push_back(-Eigen::MatrixXd::Identity(lmi.size(), lmi.size()));
    aux.lmis.push_back(std::move(l));
  }
  const int rows = static_cast<int>(p.lin_constant.size());
  aux.lin_coeffs = Eigen::MatrixXd::Zero(rows + 1, n + 1);
  aux.lin_constant = Eigen::VectorXd::Zero(rows + 1);
  if (rows > 0) {
    aux.lin_coeffs.topLeftCorner(rows, n) = p.lin_coeffs;
    aux.lin_coeffs.block(0, n, rows, 1).setConstant(-1.0);
    aux.lin_constant.head(rows) = p.lin_constant;
  }
  // s >= -1 keeps the auxiliary problem bounded below.
  aux.lin_coeffs(rows, n) = -1.0;
  aux.lin_constant(rows) = -1.0;

  Eigen::VectorXd z(n + 1);
  z.head(n) = y0;
  z(n) = std::max(s0, 0.0) + 1.0;

  PhaseOneResult out;
  auto stop = [&](const Eigen::VectorXd& v) {
    return v(n) < 0.0 && strictly_feasible(p, v.head(n));
  };
  const double theta = barrier_parameter(aux);
  double t = initial_weight(aux, z);
  while (budget > 0) {
    const CenterOutcome oc = center(aux, z, t, budget, stop);
    out.best_s = std::min(out.best_s, z(n));
    if (oc == CenterOutcome::kStopped) {
      out.feasible = true;
      out.y = z.head(n);
      return out;
    }
    if (oc == CenterOutcome::kConverged && z(n) - theta / t > 0.0) {
      return out;
    }
    if (theta / t < options.gap_abs) return out;
    t *= options.barrier_growth;
  }
  out.certain = false;
  return out;
}

std::string describe(const char* what, double t, double gap, int steps) {
  std::ostringstream os;
  os << what << " (t=" << t << ", gap=" << gap << ", newton steps=" << steps << ")";
  return os.str();
}

ConicProblem with_box(const ConicProblem& p, double radius) {
  ConicProblem out = p;
  const int n = p.num_variables;
  const int rows = static_cast<int>(p.lin_constant.size());
  out.lin_coeffs = Eigen::MatrixXd::Zero(rows + 2 * n, n);
  out.lin_constant = Eigen::VectorXd::Constant(rows + 2 * n, -radius);
  if (rows > 0) {
    out.lin_coeffs.topRows(rows) = p.lin_coeffs;
    out.lin_constant.head(rows) = p.lin_constant;
  }
  out.lin_coeffs.middleRows(rows, n).setIdentity();
  out.lin_coeffs.bottomRows(n) = -Eigen::MatrixXd::Identity(n, n);
  return out;
}

}  // namespace

BackendResult BarrierBackend::solve(const ConicProblem& original,
                                    const std::optional<Eigen::VectorXd>& start,
                                    const BackendOptions& options) const {
  BackendResult res;
  const ConicProblem p = with_box(original, options.box_radius);
  const int n = p.num_variables;
  int budget = options.max_newton_steps;

  Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
  if (start && start->size() == n && start->allFinite()) {
    y = start->cwiseMax(-0.5 * options.box_radius).cwiseMin(0.5 * options.box_radius);
  }

  if (!strictly_feasible(p, y)) {
    PhaseOneResult ph1 = phase_one(p, y, options, budget);
    res.newton_steps = options.max_newton_steps - budget;
    if (!ph1.feasible) {
      res.status = ph1.certain ? BackendStatus::kInfeasible : BackendStatus::kFailure;
      std::ostringstream os;
      os << (ph1.certain ? "infeasible" : "phase I did not terminate")
         << ": smallest constraint bound reached " << ph1.best_s;
      res.message = os.str();
      spdlog::debug("barrier: {}", res.message);
      return res;
    }
    y = ph1.y;
  }

  const double theta = barrier_parameter(p);
  if (!p.has_objective()) {
    ConicProblem centered = p;
    centered.cost.resize(0);
    center(centered, y, 1.0, budget, nullptr);
    res.status = BackendStatus::kFeasible;
    res.y = y;
    res.newton_steps = options.max_newton_steps - budget;
    res.message = "analytic center";
    return res;
  }

  double t = initial_weight(p, y);
  while (true) {
    const CenterOutcome oc = center(p, y, t, budget, nullptr);
    if (!y.allFinite() || y.cwiseAbs().maxCoeff() > 1e12) {
      res.status = BackendStatus::kFailure;
      res.y = y;
      res.message = "iterates diverged; objective may be unbounded";
      return res;
    }
    const double obj = p.cost.dot(y);
    const double gap = theta / t;
    if (gap <= options.gap_abs + options.gap_rel * std::abs(obj)) {
      res.status = BackendStatus::kOptimal;
      res.message = describe("optimal", t, gap, options.max_newton_steps - budget);
      break;
    }
    if (oc == CenterOutcome::kStalled && gap <= options.stall_gap * (1.0 + std::abs(obj))) {
      res.status = BackendStatus::kOptimal;
      res.message = describe("optimal to working precision", t, gap,
                             options.max_newton_steps - budget);
      break;
    }
    if (oc == CenterOutcome::kBudget || budget <= 0 || t > 1e18) {
      res.status = BackendStatus::kFeasible;
      res.message = describe("stopped before closing the gap", t, gap,
                             options.max_newton_steps - budget);
      break;
    }
    t *= options.barrier_growth;
  }
  res.y = y;
  res.newton_steps = options.max_newton_steps - budget;
  spdlog::debug("barrier: {}", res.message);
  return res;
}

}  // namespace lipsyn::lmi
