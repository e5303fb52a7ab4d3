#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include <Eigen/Dense>

namespace lipsyn::system {

/// f(x, u) -> R^g. Must be pure.
using Nonlinearity =
    std::function<Eigen::VectorXd(const Eigen::VectorXd& x, const Eigen::VectorXd& u)>;

/// x[k+1] = A x[k] + G f(x[k], u[k]) + B u[k],  y[k] = C x[k]
class LipschitzSystem {
 public:
  /// Throws DimensionError on inconsistent shapes and std::invalid_argument
  /// on negative Lipschitz constants or an empty f.
  LipschitzSystem(Eigen::MatrixXd A, Eigen::MatrixXd B, Eigen::MatrixXd G,
                  Eigen::MatrixXd C, Nonlinearity f, double gamma_x, double gamma_u,
                  std::string f_name = "custom");

  const Eigen::MatrixXd& A() const { return A_; }
  const Eigen::MatrixXd& B() const { return B_; }
  const Eigen::MatrixXd& G() const { return G_; }
  const Eigen::MatrixXd& C() const { return C_; }
  double gamma_x() const { return gamma_x_; }
  double gamma_u() const { return gamma_u_; }
  const std::string& f_name() const { return f_name_; }
  const Nonlinearity& nonlinearity() const { return f_; }

  int n() const { return static_cast<int>(A_.rows()); }
  int m() const { return static_cast<int>(B_.cols()); }
  int g() const { return static_cast<int>(G_.cols()); }
  int p() const { return static_cast<int>(C_.rows()); }

  Eigen::VectorXd f(const Eigen::VectorXd& x, const Eigen::VectorXd& u) const;
  Eigen::VectorXd step(const Eigen::VectorXd& x, const Eigen::VectorXd& u) const;
  Eigen::VectorXd output(const Eigen::VectorXd& x) const { return C_ * x; }

 private:
  Eigen::MatrixXd A_, B_, G_, C_;
  Nonlinearity f_;
  double gamma_x_;
  double gamma_u_;
  std::string f_name_;
};

/// dx/dt = A x + G f(x, u) + B u,  y = C x
class ContinuousSystem {
 public:
  ContinuousSystem(Eigen::MatrixXd A, Eigen::MatrixXd B, Eigen::MatrixXd G,
                   Eigen::MatrixXd C, Nonlinearity f, double gamma_x, double gamma_u,
                   std::string f_name = "custom");

  const Eigen::MatrixXd& A() const { return model_.A(); }
  const Eigen::MatrixXd& B() const { return model_.B(); }
  const Eigen::MatrixXd& G() const { return model_.G(); }
  const Eigen::MatrixXd& C() const { return model_.C(); }
  double gamma_x() const { return model_.gamma_x(); }
  double gamma_u() const { return model_.gamma_u(); }
  const std::string& f_name() const { return model_.f_name(); }
  const Nonlinearity& nonlinearity() const { return model_.nonlinearity(); }
  int n() const { return model_.n(); }

  /// Right-hand side A x + G f(x, u) + B u.
  Eigen::VectorXd derivative(const Eigen::VectorXd& x, const Eigen::VectorXd& u) const;

 private:
  // Same shape rules; the step() of this object is never used.
  LipschitzSystem model_;
};

/// A_d = I + T A,  B_d = T B,  G_d = T G. Throws std::invalid_argument for T <= 0.
LipschitzSystem euler_discretize(const ContinuousSystem& sys, double T);

/// Integrator-augmented plant for output tracking:
///
///   z[k+1] = z[k] + E (C x[k] - r)
///
///   A~ = [[A, 0], [E C, I]],  B~ = [B; 0],  G~ = blkdiag(G, E),
///   f~(x~, u) = (f(x, u), -r),  C~ = [C, 0].
class AugmentedSystem {
 public:
  AugmentedSystem(LipschitzSystem base, Eigen::MatrixXd E, Eigen::VectorXd r);

  const LipschitzSystem& base() const { return base_; }
  const Eigen::MatrixXd& E() const { return E_; }
  const Eigen::VectorXd& reference() const { return r_; }
  /// The augmented plant, state (x, z) of dimension n + p.
  const LipschitzSystem& system() const { return augmented_; }

 private:
  LipschitzSystem base_;
  Eigen::MatrixXd E_;
  Eigen::VectorXd r_;
  LipschitzSystem augmented_;
};

AugmentedSystem augment_for_tracking(const LipschitzSystem& sys, const Eigen::MatrixXd& E,
                                     const Eigen::VectorXd& r);

/// gamma_x + gamma_u * kappa. Throws std::invalid_argument on negative
/// arguments or kappa <= 0.
double effective_lipschitz(double gamma_x, double gamma_u, double kappa);

struct LipschitzEstimate {
  double gamma_x = 0.0;
  double gamma_u = 0.0;
};

/// Largest observed difference quotients of f over random pairs drawn
/// uniformly from [-box, box] per coordinate. Deterministic given `seed`.
LipschitzEstimate sample_lipschitz_estimate(const LipschitzSystem& sys, int n_samples,
                                            std::uint64_t seed, double box = 5.0);

struct EquilibriumInfo {
  Eigen::VectorXd x_eq;
  Eigen::VectorXd u_eq;
  /// || x_eq - (A x_eq + G f(x_eq, u_eq) + B u_eq) ||_2
  double residual = 0.0;
};

double equilibrium_residual(const LipschitzSystem& sys, const Eigen::VectorXd& x,
                            const Eigen::VectorXd& u);

}  // namespace lipsyn::system
