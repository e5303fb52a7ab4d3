#include "lipsyn/synthesis/initialization.h"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include <spdlog/spdlog.h>

#include "lipsyn/errors.h"
#include "lipsyn/lmi/linalg.h"
#include "lipsyn/lmi/lmi_problem.h"
#include "lipsyn/synthesis/theorem.h"

namespace lipsyn::synthesis {

using lmi::MatrixExpr;
using lmi::Sense;

namespace {

constexpr double kEpsilonCap = 1e6;

}  // namespace

Step1Result step1_initial_lyapunov(const system::LipschitzSystem& sys, double alpha,
                                   double rho, double delta) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("step1: alpha must lie in (0, 1)");
  }
  if (!(rho < 0.0)) throw std::invalid_argument("step1: rho must be negative");
  const int n = sys.n(), m = sys.m();
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);

  lmi::LmiProblem prob;
  const auto X = prob.add_symmetric("X", n);
  const auto Z = prob.add_matrix("Z", m, n);
  const auto nu = prob.add_scalar("nu");

  const MatrixExpr x(X);
  const MatrixExpr axbz = sys.A() * x - sys.B() * MatrixExpr(Z);
  MatrixExpr block = lmi::assemble_block({{(alpha - 1.0) * x, axbz}, {std::nullopt, -x}});
  block -= MatrixExpr(nu).times(Eigen::MatrixXd::Identity(2 * n, 2 * n));
  prob.add_lmi(block, Sense::kNsd, delta, "step1 block");
  prob.add_lmi(x, Sense::kPsd, delta, "X > 0");
  prob.add_lmi(x - MatrixExpr::constant(I), Sense::kNsd, 0.0, "X <= I");
  prob.minimize(nu);

  const lmi::LmiSolution sol = lmi::solve(prob);
  if (!sol.ok()) {
    throw InfeasibleInitialization(std::string("step 1 solve failed (") +
                                   lmi::to_string(sol.status) + "): " + sol.message);
  }
  const double nu_star = sol.assignment.scalar(nu);
  if (!(nu_star < -delta)) {
    std::ostringstream os;
    os << "step 1: no stabilizing linear gain at alpha=" << alpha
       << " (smallest achievable nu = " << nu_star << ")";
    throw InfeasibleInitialization(os.str());
  }
  const double scale = rho / nu_star;
  Step1Result out;
  out.X = scale * lmi::symmetrize(sol.assignment.at(X));
  out.Z = scale * sol.assignment.at(Z);
  out.nu = rho;
  spdlog::debug("step1: alpha={} nu*={} scale={}", alpha, nu_star, scale);
  return out;
}

std::optional<Step2Result> step2_initial_gain(const system::LipschitzSystem& sys,
                                              const Eigen::MatrixXd& Q0, double kappa,
                                              double delta) {
  if (!(kappa > 0.0)) throw std::invalid_argument("step2: kappa must be positive");
  const int n = sys.n(), m = sys.m(), g = sys.g();
  if (Q0.rows() != n || Q0.cols() != n) throw DimensionError("step2: Q0 has the wrong shape");
  const auto [qmin, qmax] = lmi::eig_extrema(Q0);
  if (!(qmin > 0.0)) throw std::invalid_argument("step2: Q0 must be positive definite");

  // The conditions are invariant under Q -> c Q, eps -> c eps. Scaling by
  // the geometric mean of the extreme eigenvalues balances Q against Q^-1,
  // which keeps the strictness margin small relative to the slack.
  const double scale = std::sqrt(qmin * qmax);
  const Eigen::MatrixXd Qn = lmi::symmetrize(Q0 / scale);
  const Eigen::MatrixXd Qn_inv = lmi::symmetrize(Qn.inverse());
  const double gk = sys.gamma_x() + sys.gamma_u() * kappa;

  lmi::LmiProblem prob;
  const auto K = prob.add_matrix("K", m, n);
  const auto eps = prob.add_scalar("epsilon", 0.0, kEpsilonCap);
  const auto alpha = prob.add_scalar("alpha", delta, 1.0 - delta);

  const MatrixExpr e(eps);
  const MatrixExpr b11 = MatrixExpr(alpha).times(Qn) - MatrixExpr::constant(Qn) +
                         e.times(gk * gk * Eigen::MatrixXd::Identity(n, n));
  const MatrixExpr acl = MatrixExpr::constant(sys.A()) - sys.B() * MatrixExpr(K);
  const MatrixExpr block = lmi::assemble_block({
      {b11, std::nullopt, std::nullopt},
      {MatrixExpr::zero(g, n), e.times(-Eigen::MatrixXd::Identity(g, g)), std::nullopt},
      {acl, MatrixExpr::constant(sys.G()), MatrixExpr::constant(-Qn_inv)},
  });
  prob.add_lmi(block, Sense::kNsd, lmi::default_margin(block, delta), "stability block");

  const MatrixExpr norm_block = lmi::assemble_block({
      {MatrixExpr::constant(-kappa * Eigen::MatrixXd::Identity(m, m)), MatrixExpr(K)},
      {std::nullopt, MatrixExpr::constant(-kappa * Eigen::MatrixXd::Identity(n, n))},
  });
  prob.add_lmi(norm_block, Sense::kNsd, 0.0, "gain norm");

  const lmi::LmiSolution sol = lmi::solve(prob);
  if (!sol.ok()) {
    spdlog::debug("step2: kappa={} -> {} ({})", kappa, lmi::to_string(sol.status), sol.message);
    return std::nullopt;
  }
  Step2Result out;
  out.K = sol.assignment.at(K);
  out.epsilon = sol.assignment.scalar(eps) * scale;
  out.alpha = sol.assignment.scalar(alpha);
  out.kappa = kappa;
  out.certificate = check_theorem1(sys, Q0, out.K, out.epsilon, kappa, out.alpha);
  spdlog::debug("step2: kappa={} alpha={} eps={} {}", kappa, out.alpha, out.epsilon,
                out.certificate.summary());
  return out;
}

}  // namespace lipsyn::synthesis
