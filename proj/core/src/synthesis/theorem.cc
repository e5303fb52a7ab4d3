#include "lipsyn/synthesis/theorem.h"

#include <sstream>
#include <stdexcept>

#include "lipsyn/errors.h"
#include "lipsyn/lmi/linalg.h"

namespace lipsyn::synthesis {

std::vector<double> default_kappa_schedule(double kappa0) {
  return {kappa0, 2 * kappa0, 5 * kappa0, 10 * kappa0, 40 * kappa0};
}

void SynthesisConfig::validate() const {
  auto fail = [](const std::string& what) {
    throw std::invalid_argument("synthesis config: " + what);
  };
  if (!(alpha_init > 0.0 && alpha_init < 1.0)) fail("alpha_init must lie in (0, 1)");
  if (!(rho < 0.0)) fail("rho must be negative");
  if (!(kappa0 > 0.0)) fail("kappa0 must be positive");
  if (!(eps_small > 0.0)) fail("eps_small must be positive");
  if (!(tol > 0.0)) fail("tol must be positive");
  if (max_iter < 1) fail("max_iter must be at least 1");
  if (kappa_retry_schedule.empty()) fail("kappa_retry_schedule must not be empty");
  for (double k : kappa_retry_schedule) {
    if (!(k > 0.0)) fail("kappa_retry_schedule entries must be positive");
  }
  if (!(delta > 0.0)) fail("delta must be positive");
  if (!(sigma > 0.0)) fail("sigma must be positive");
}

void ScaIterate::validate(double gamma_x, double gamma_u, double slack) const {
  if (Q.rows() == 0 || Q.rows() != Q.cols()) {
    throw DimensionError("iterate Q must be square");
  }
  const auto [lmin, lmax] = lmi::eig_extrema(Q);
  if (!(lmin > 0.0)) throw std::invalid_argument("iterate Q is not positive definite");
  if (lmax > t + slack) throw std::invalid_argument("iterate violates Q <= t I");
  if (!(kappa > 0.0) || lmi::spectral_norm(K) > kappa + slack) {
    throw std::invalid_argument("iterate violates ||K||_2 <= kappa");
  }
  const double gk = gamma_x + gamma_u * kappa;
  if (gk * gk > w + slack) throw std::invalid_argument("iterate violates (gx + gu kappa)^2 <= w");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("iterate alpha outside (0, 1)");
  if (epsilon < -slack) throw std::invalid_argument("iterate epsilon is negative");
}

bool FeasibilityCertificate::valid() const {
  return lhs_eigs.size() > 0 && max_eig() < -margin &&
         norm_gap >= std::min(0.0, margin) && scalar_checks.all();
}

std::string FeasibilityCertificate::summary() const {
  std::ostringstream os;
  os << (valid() ? "valid" : "INVALID") << ": lambda_max=" << max_eig()
     << " norm_gap=" << norm_gap << " alpha_ok=" << scalar_checks.alpha_in_range
     << " eps_ok=" << scalar_checks.epsilon_nonnegative
     << " kappa_ok=" << scalar_checks.kappa_positive
     << " Q_pd=" << scalar_checks.q_positive_definite;
  return os.str();
}

Eigen::MatrixXd Step1Result::Q0() const { return lmi::symmetrize(X.inverse()); }

Eigen::MatrixXd Step1Result::K0() const { return Z * X.inverse(); }

Eigen::MatrixXd theorem1_matrix(const system::LipschitzSystem& sys, const Eigen::MatrixXd& Q,
                                const Eigen::MatrixXd& K, double epsilon, double kappa,
                                double alpha) {
  const int n = sys.n(), g = sys.g();
  if (Q.rows() != n || Q.cols() != n) {
    throw DimensionError("Q must be " + std::to_string(n) + "x" + std::to_string(n));
  }
  if (K.rows() != sys.m() || K.cols() != n) {
    throw DimensionError("K must be " + std::to_string(sys.m()) + "x" + std::to_string(n));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> qs(lmi::symmetrize(Q),
                                                    Eigen::EigenvaluesOnly);
  const Eigen::VectorXd abs_eigs = qs.eigenvalues().cwiseAbs();
  if (!(abs_eigs.minCoeff() > 1e-14 * abs_eigs.maxCoeff())) {
    throw std::invalid_argument("check_theorem1: Q is singular");
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(Q);

  const double gk = sys.gamma_x() + sys.gamma_u() * kappa;
  const Eigen::MatrixXd acl = sys.A() - sys.B() * K;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2 * n + g, 2 * n + g);
  m.topLeftCorner(n, n) =
      (alpha - 1.0) * Q + epsilon * gk * gk * Eigen::MatrixXd::Identity(n, n);
  m.block(n, n, g, g) = -epsilon * Eigen::MatrixXd::Identity(g, g);
  m.block(0, n + g, n, n) = acl.transpose();
  m.block(n + g, 0, n, n) = acl;
  m.block(n, n + g, g, n) = sys.G().transpose();
  m.block(n + g, n, n, g) = sys.G();
  m.bottomRightCorner(n, n) = -lmi::symmetrize(lu.inverse());
  return m;
}

FeasibilityCertificate check_theorem1(const system::LipschitzSystem& sys,
                                      const Eigen::MatrixXd& Q, const Eigen::MatrixXd& K,
                                      double epsilon, double kappa, double alpha,
                                      double margin) {
  const Eigen::MatrixXd m = theorem1_matrix(sys, Q, K, epsilon, kappa, alpha);
  FeasibilityCertificate cert;
  cert.margin = margin;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(lmi::symmetrize(m),
                                                    Eigen::EigenvaluesOnly);
  cert.lhs_eigs = es.eigenvalues();
  cert.norm_gap = kappa - lmi::spectral_norm(K);
  cert.scalar_checks.alpha_in_range = alpha > 0.0 && alpha < 1.0;
  cert.scalar_checks.epsilon_nonnegative = epsilon >= std::min(0.0, margin);
  cert.scalar_checks.kappa_positive = kappa > 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> qs(lmi::symmetrize(Q),
                                                    Eigen::EigenvaluesOnly);
  cert.scalar_checks.q_positive_definite = qs.eigenvalues()(0) > 0.0;
  return cert;
}

}  // namespace lipsyn::synthesis
