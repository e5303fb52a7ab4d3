#include "lipsyn/system/lipschitz_system.h"

#include <random>
#include <sstream>
#include <stdexcept>

#include "lipsyn/errors.h"

namespace lipsyn::system {

namespace {

std::string shape(const Eigen::MatrixXd& m) {
  std::ostringstream os;
  os << m.rows() << "x" << m.cols();
  return os.str();
}

void check_shapes(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                  const Eigen::MatrixXd& G, const Eigen::MatrixXd& C) {
  if (A.rows() == 0 || A.rows() != A.cols()) {
    throw DimensionError("A must be square and non-empty, got " + shape(A));
  }
  if (B.rows() != A.rows()) {
    throw DimensionError("B is " + shape(B) + " but A is " + shape(A));
  }
  if (G.rows() != A.rows()) {
    throw DimensionError("G is " + shape(G) + " but A is " + shape(A));
  }
  if (C.cols() != A.cols()) {
    throw DimensionError("C is " + shape(C) + " but A is " + shape(A));
  }
  if (!A.allFinite() || !B.allFinite() || !G.allFinite() || !C.allFinite()) {
    throw std::invalid_argument("system matrices must be finite");
  }
}

}  // namespace

LipschitzSystem::LipschitzSystem(Eigen::MatrixXd A, Eigen::MatrixXd B, Eigen::MatrixXd G,
                                 Eigen::MatrixXd C, Nonlinearity f, double gamma_x,
                                 double gamma_u, std::string f_name)
    : A_(std::move(A)),
      B_(std::move(B)),
      G_(std::move(G)),
      C_(std::move(C)),
      f_(std::move(f)),
      gamma_x_(gamma_x),
      gamma_u_(gamma_u),
      f_name_(std::move(f_name)) {
  check_shapes(A_, B_, G_, C_);
  if (!(gamma_x_ >= 0.0) || !(gamma_u_ >= 0.0)) {
    throw std::invalid_argument("Lipschitz constants must be non-negative");
  }
  if (!f_) throw std::invalid_argument("nonlinearity handle is empty");
}

Eigen::VectorXd LipschitzSystem::f(const Eigen::VectorXd& x, const Eigen::VectorXd& u) const {
  if (x.size() != n() || u.size() != m()) {
    throw DimensionError("f expects x of length " + std::to_string(n()) +
                         " and u of length " + std::to_string(m()));
  }
  Eigen::VectorXd v = f_(x, u);
  if (v.size() != g()) {
    throw DimensionError("nonlinearity '" + f_name_ + "' returned length " +
                         std::to_string(v.size()) + ", expected " + std::to_string(g()));
  }
  return v;
}

Eigen::VectorXd LipschitzSystem::step(const Eigen::VectorXd& x, const Eigen::VectorXd& u) const {
  return A_ * x + G_ * f(x, u) + B_ * u;
}

ContinuousSystem::ContinuousSystem(Eigen::MatrixXd A, Eigen::MatrixXd B, Eigen::MatrixXd G,
                                   Eigen::MatrixXd C, Nonlinearity f, double gamma_x,
                                   double gamma_u, std::string f_name)
    : model_(std::move(A), std::move(B), std::move(G), std::move(C), std::move(f), gamma_x,
             gamma_u, std::move(f_name)) {}

Eigen::VectorXd ContinuousSystem::derivative(const Eigen::VectorXd& x,
                                             const Eigen::VectorXd& u) const {
  return A() * x + G() * model_.f(x, u) + B() * u;
}

LipschitzSystem euler_discretize(const ContinuousSystem& sys, double T) {
  if (!(T > 0.0)) {
    throw std::invalid_argument("euler_discretize: sampling time must be positive");
  }
  const int n = sys.n();
  return LipschitzSystem(Eigen::MatrixXd::Identity(n, n) + T * sys.A(), T * sys.B(),
                         T * sys.G(), sys.C(), sys.nonlinearity(), sys.gamma_x(),
                         sys.gamma_u(), sys.f_name());
}

namespace {

LipschitzSystem build_augmented(const LipschitzSystem& base, const Eigen::MatrixXd& E,
                                const Eigen::VectorXd& r) {
  const int n = base.n(), m = base.m(), g = base.g(), p = base.p();
  if (E.rows() != p || E.cols() != p) {
    throw DimensionError("E must be " + std::to_string(p) + "x" + std::to_string(p) +
                         ", got " + shape(E));
  }
  if (r.size() != p) {
    throw DimensionError("reference must have length " + std::to_string(p) + ", got " +
                         std::to_string(r.size()));
  }
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n + p, n + p);
  A.topLeftCorner(n, n) = base.A();
  A.bottomLeftCorner(p, n) = E * base.C();
  A.bottomRightCorner(p, p).setIdentity();

  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n + p, m);
  B.topRows(n) = base.B();

  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(n + p, g + p);
  G.topLeftCorner(n, g) = base.G();
  G.bottomRightCorner(p, p) = E;

  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(p, n + p);
  C.leftCols(n) = base.C();

  Nonlinearity f = [base_f = base.nonlinearity(), n, g, p, r](const Eigen::VectorXd& x,
                                                              const Eigen::VectorXd& u) {
    Eigen::VectorXd out(g + p);
    out.head(g) = base_f(x.head(n), u);
    out.tail(p) = -r;
    return out;
  };
  return LipschitzSystem(std::move(A), std::move(B), std::move(G), std::move(C), std::move(f),
                         base.gamma_x(), base.gamma_u(), base.f_name() + "+tracking");
}

}  // namespace

AugmentedSystem::AugmentedSystem(LipschitzSystem base, Eigen::MatrixXd E, Eigen::VectorXd r)
    : base_(std::move(base)),
      E_(std::move(E)),
      r_(std::move(r)),
      augmented_(build_augmented(base_, E_, r_)) {}

AugmentedSystem augment_for_tracking(const LipschitzSystem& sys, const Eigen::MatrixXd& E,
                                     const Eigen::VectorXd& r) {
  return AugmentedSystem(sys, E, r);
}

double effective_lipschitz(double gamma_x, double gamma_u, double kappa) {
  if (!(gamma_x >= 0.0) || !(gamma_u >= 0.0)) {
    throw std::invalid_argument("effective_lipschitz: negative Lipschitz constant");
  }
  if (!(kappa > 0.0)) {
    throw std::invalid_argument("effective_lipschitz: kappa must be positive");
  }
  return gamma_x + gamma_u * kappa;
}

LipschitzEstimate sample_lipschitz_estimate(const LipschitzSystem& sys, int n_samples,
                                            std::uint64_t seed, double box) {
  if (n_samples < 2) throw std::invalid_argument("sample_lipschitz_estimate: n_samples < 2");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-box, box);
  auto draw = [&](int len) {
    Eigen::VectorXd v(len);
    for (int i = 0; i < len; ++i) v(i) = dist(rng);
    return v;
  };
  LipschitzEstimate est;
  for (int s = 0; s < n_samples; ++s) {
    const Eigen::VectorXd x1 = draw(sys.n()), x2 = draw(sys.n());
    const Eigen::VectorXd u1 = draw(sys.m()), u2 = draw(sys.m());
    const double dx = (x1 - x2).norm();
    if (dx > 0.0) {
      est.gamma_x = std::max(est.gamma_x, (sys.f(x1, u1) - sys.f(x2, u1)).norm() / dx);
    }
    const double du = (u1 - u2).norm();
    if (du > 0.0) {
      est.gamma_u = std::max(est.gamma_u, (sys.f(x1, u1) - sys.f(x1, u2)).norm() / du);
    }
  }
  return est;
}

double equilibrium_residual(const LipschitzSystem& sys, const Eigen::VectorXd& x,
                            const Eigen::VectorXd& u) {
  return (x - sys.step(x, u)).norm();
}

}  // namespace lipsyn::system
