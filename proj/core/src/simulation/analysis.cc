#include "lipsyn/simulation/analysis.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lipsyn/errors.h"

namespace lipsyn::simulation {

std::vector<double> lyapunov_sequence(const Trajectory& traj, const Eigen::MatrixXd& Q,
                                      const Eigen::VectorXd& x_eq) {
  const Eigen::Index n = traj.states.cols();
  if (Q.rows() != n || Q.cols() != n || x_eq.size() != n) {
    throw DimensionError("Lyapunov matrix or equilibrium does not match the state dimension");
  }
  const double scale = std::max(1.0, Q.cwiseAbs().maxCoeff());
  if ((Q - Q.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw std::invalid_argument("Lyapunov matrix is not symmetric");
  }
  std::vector<double> v(static_cast<std::size_t>(traj.states.rows()));
  for (Eigen::Index k = 0; k < traj.states.rows(); ++k) {
    const Eigen::VectorXd e = traj.states.row(k).transpose() - x_eq;
    v[static_cast<std::size_t>(k)] = e.dot(Q * e);
  }
  return v;
}

system::EquilibriumInfo estimate_equilibrium(const system::LipschitzSystem& sys,
                                             const Trajectory& traj,
                                             const EquilibriumOptions& options) {
  if (!(options.tail_fraction > 0.0 && options.tail_fraction <= 1.0)) {
    throw std::invalid_argument("tail fraction must lie in (0, 1]");
  }
  if (traj.states.cols() != sys.n() || traj.inputs.cols() != sys.m()) {
    throw DimensionError("trajectory does not match the system dimensions");
  }
  const Eigen::Index rows = traj.states.rows();
  const Eigen::Index len =
      std::max<Eigen::Index>(1, static_cast<Eigen::Index>(std::ceil(options.tail_fraction * rows)));
  const Eigen::MatrixXd tail = traj.states.bottomRows(len);
  const Eigen::RowVectorXd mean = tail.colwise().mean();
  const double variance =
      len > 1 ? ((tail.rowwise() - mean).colwise().squaredNorm() / double(len)).maxCoeff() : 0.0;
  if (!(variance <= options.variance_threshold)) {
    throw NotConvergedError("trajectory tail has not settled (variance " +
                                std::to_string(variance) + ")",
                            variance);
  }
  system::EquilibriumInfo info;
  info.x_eq = mean.transpose();
  const Eigen::Index ulen = std::min(len, traj.inputs.rows());
  info.u_eq = ulen > 0 ? Eigen::VectorXd(traj.inputs.bottomRows(ulen).colwise().mean().transpose())
                       : Eigen::VectorXd::Zero(sys.m());
  info.residual = system::equilibrium_residual(sys, info.x_eq, info.u_eq);
  return info;
}

Eigen::VectorXd error_norms(const Trajectory& traj, const Eigen::VectorXd& x_eq) {
  if (x_eq.size() != traj.states.cols()) {
    throw DimensionError("equilibrium does not match the state dimension");
  }
  return (traj.states.rowwise() - x_eq.transpose()).rowwise().norm();
}

DecayFit fit_exponential_decay(const Trajectory& traj, const Eigen::VectorXd& x_eq) {
  constexpr double kFloor = 1e-9;
  const Eigen::VectorXd e = error_norms(traj, x_eq);
  DecayFit fit;
  if (e.maxCoeff() == 0.0) {
    fit.degenerate = true;
    return fit;
  }
  if (e(0) == 0.0) throw std::invalid_argument("initial error is zero but later errors are not");
  if (e(0) <= kFloor) {
    fit.degenerate = true;
    return fit;
  }
  int count = 0;
  while (count < e.size() && e(count) > kFloor) ++count;
  fit.samples = count;
  if (count < 2) {
    fit.prefactor = 1.0;
    return fit;
  }
  double sk = 0, sy = 0, skk = 0, sky = 0;
  for (int k = 0; k < count; ++k) {
    const double y = std::log(e(k));
    sk += k;
    sy += y;
    skk += double(k) * k;
    sky += k * y;
  }
  const double slope = (count * sky - sk * sy) / (count * skk - sk * sk);
  const double intercept = (sy - slope * sk) / count;
  fit.rate = std::exp(slope);
  fit.prefactor = std::exp(intercept) / e(0);
  for (int k = 0; k < count; ++k) {
    const double envelope = fit.prefactor * std::pow(fit.rate, k) * e(0);
    fit.max_violation = std::max(fit.max_violation, e(k) - envelope);
  }
  return fit;
}

bool peaks_nonincreasing(const Eigen::VectorXd& v, int start, double rel_tol, double abs_tol) {
  const Eigen::VectorXd a = v.cwiseAbs();
  std::vector<double> peaks;
  for (Eigen::Index k = std::max(start, 1); k + 1 < a.size(); ++k) {
    if (a(k) >= a(k - 1) && a(k) > a(k + 1)) peaks.push_back(a(k));
  }
  if (peaks.size() < 2) return true;
  const double top = *std::max_element(peaks.begin(), peaks.end());
  for (std::size_t i = 1; i < peaks.size(); ++i) {
    if (peaks[i] > peaks[i - 1] + rel_tol * top + abs_tol) return false;
  }
  return true;
}

}  // namespace lipsyn::simulation
