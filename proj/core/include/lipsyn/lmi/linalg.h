#pragma once

#include <utility>

#include <Eigen/Dense>

namespace lipsyn::lmi {

/// Largest singular value.
double spectral_norm(const Eigen::MatrixXd& m);

/// (lambda_min, lambda_max) of a symmetric matrix. Throws
/// std::invalid_argument when `m` is not square or not symmetric within
/// 1e-10 relative to its largest entry.
std::pair<double, double> eig_extrema(const Eigen::MatrixXd& m);

double max_eigenvalue(const Eigen::MatrixXd& m);
double min_eigenvalue(const Eigen::MatrixXd& m);

/// Max-abs entry, 0 for an empty matrix.
double max_abs(const Eigen::MatrixXd& m);

Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& m);

}  // namespace lipsyn::lmi
