#pragma once

#include <cstdint>
#include <random>
#include <string>

#include <Eigen/Dense>

#include "lipsyn/system/lipschitz_system.h"

namespace lipsyn::testing {

using Rng = std::mt19937_64;

Eigen::MatrixXd random_matrix(Rng& rng, int rows, int cols, double scale = 1.0);
/// Symmetric with eigenvalues drawn uniformly from [lo, hi].
Eigen::MatrixXd random_spd(Rng& rng, int n, double lo, double hi);
double uniform(Rng& rng, double lo, double hi);
int uniform_int(Rng& rng, int lo, int hi);

/// Discrete-time system with f = 0 and random A, B, G of the given sizes.
system::LipschitzSystem random_system(Rng& rng, int n, int m, int g, double gamma_x,
                                      double gamma_u);

struct PropertyReport {
  std::string name;
  int trials = 0;
  int violations = 0;
  int skipped = 0;
  /// Largest violation of the checked inequality (<= 0 when it holds).
  double worst = -std::numeric_limits<double>::infinity();
  std::string detail;

  bool passed() const { return trials > 0 && violations == 0; }
};

/// lambda_min(H~ - H) >= -1e-9 at random points, and H~ = H at the
/// expansion point.
PropertyReport check_h_dominance(int trials, std::uint64_t seed);
/// F~ - F >= -1e-12, equality at the expansion point.
PropertyReport check_f_dominance(int trials, std::uint64_t seed);
/// -Y^-1 <= -2 X^-1 + X^-1 Y X^-1 + 1e-9 I for random SPD X, Y.
PropertyReport check_inverse_bound(int trials, std::uint64_t seed);
/// Points returned by the convex subproblem pass the stability check with
/// the margin relaxed by 1e-6. `trials` counts solved subproblems.
PropertyReport check_surrogate_conservative(int trials, std::uint64_t seed);
/// sign(lambda_max) of the Schur-reduced stability matrix agrees with the
/// unreduced form [[Psi, *], [G'Q(A-BK), G'QG - eps I]].
PropertyReport check_schur_equivalence(int trials, std::uint64_t seed);

/// [[Psi, *], [G'Q(A-BK), G'QG - eps I]],
/// Psi = (A-BK)'Q(A-BK) + (alpha-1) Q + eps gk^2 I.
Eigen::MatrixXd unreduced_stability_matrix(const system::LipschitzSystem& sys,
                                           const Eigen::MatrixXd& Q, const Eigen::MatrixXd& K,
                                           double epsilon, double kappa, double alpha);

}  // namespace lipsyn::testing
