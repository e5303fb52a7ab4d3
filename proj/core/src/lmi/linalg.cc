#include "lipsyn/lmi/linalg.h"

#include <stdexcept>

namespace lipsyn::lmi {

double spectral_norm(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues()(0);
}

double max_abs(const Eigen::MatrixXd& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& m) {
  return 0.5 * (m + m.transpose());
}

std::pair<double, double> eig_extrema(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols() || m.size() == 0) {
    throw std::invalid_argument("eig_extrema: matrix must be square and non-empty");
  }
  const double scale = max_abs(m);
  if (max_abs(m - m.transpose()) > 1e-10 * scale) {
    throw std::invalid_argument("eig_extrema: matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrize(m),
                                                    Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& ev = es.eigenvalues();
  return {ev(0), ev(ev.size() - 1)};
}

double max_eigenvalue(const Eigen::MatrixXd& m) { return eig_extrema(m).second; }

double min_eigenvalue(const Eigen::MatrixXd& m) { return eig_extrema(m).first; }

}  // namespace lipsyn::lmi
