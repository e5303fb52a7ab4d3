#include "lipsyn/synthesis/sca.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <spdlog/spdlog.h>

#include "lipsyn/errors.h"
#include "lipsyn/lmi/linalg.h"
#include "lipsyn/synthesis/initialization.h"
#include "lipsyn/synthesis/theorem.h"

namespace lipsyn::synthesis {

using lmi::MatrixExpr;
using lmi::Sense;

lmi::MatrixExpr linearize_H(const MatrixExpr& alpha, const MatrixExpr& Q, double alpha_t,
                            const Eigen::MatrixXd& Q_t) {
  const int n = Q.rows();
  if (alpha.rows() != 1 || alpha.cols() != 1) {
    throw DimensionError("linearize_H: alpha must be 1x1");
  }
  if (Q.cols() != n || Q_t.rows() != n || Q_t.cols() != n) {
    throw DimensionError("linearize_H: Q and Q_t must be square of the same size");
  }
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  MatrixExpr h = MatrixExpr::constant(alpha_t * alpha_t * I + Q_t * Q_t - 2.0 * alpha_t * Q_t);
  h += alpha.times(-2.0 * alpha_t * I + 2.0 * Q_t);
  h += 2.0 * alpha_t * Q;
  h -= Q_t * Q;
  h -= Q * Q_t;
  return h;
}

Eigen::MatrixXd linearize_H(double alpha, const Eigen::MatrixXd& Q, double alpha_t,
                            const Eigen::MatrixXd& Q_t) {
  const lmi::Variable a{0, lmi::VariableKind::kScalar, 1, 1};
  const lmi::Variable q{1, lmi::VariableKind::kRectangular, static_cast<int>(Q.rows()),
                        static_cast<int>(Q.cols())};
  lmi::Assignment values;
  values.set(a, alpha);
  values.set(q, Q);
  return linearize_H(MatrixExpr(a), MatrixExpr(q), alpha_t, Q_t).evaluate(values);
}

lmi::MatrixExpr linearize_F(const MatrixExpr& epsilon, const MatrixExpr& w, double eps_t,
                            double w_t) {
  MatrixExpr f = MatrixExpr::scalar(eps_t * eps_t + w_t * w_t - 2.0 * eps_t * w_t);
  f += -2.0 * (eps_t - w_t) * epsilon;
  f += -2.0 * (w_t - eps_t) * w;
  return f;
}

double linearize_F(double epsilon, double w, double eps_t, double w_t) {
  const lmi::Variable e{0, lmi::VariableKind::kScalar, 1, 1};
  const lmi::Variable v{1, lmi::VariableKind::kScalar, 1, 1};
  lmi::Assignment values;
  values.set(e, epsilon);
  values.set(v, w);
  return linearize_F(MatrixExpr(e), MatrixExpr(v), eps_t, w_t).evaluate(values)(0, 0);
}

ScaIterate ScaProblem::extract(const lmi::Assignment& a) const {
  ScaIterate it;
  it.Q = lmi::symmetrize(a.at(Q));
  it.K = a.at(K);
  it.kappa = a.scalar(kappa);
  it.epsilon = a.scalar(epsilon);
  it.alpha = a.scalar(alpha);
  it.t = a.scalar(t);
  it.w = a.scalar(w);
  return it;
}

lmi::Assignment ScaProblem::assignment(const ScaIterate& it) const {
  lmi::Assignment a;
  a.set(Q, it.Q);
  a.set(K, it.K);
  a.set(kappa, it.kappa);
  a.set(epsilon, it.epsilon);
  a.set(alpha, it.alpha);
  a.set(t, it.t);
  a.set(w, it.w);
  return a;
}

ScaProblem build_sca_lmi(const system::LipschitzSystem& sys, const ScaIterate& prev,
                         const ScaBounds& bounds) {
  const int n = sys.n(), m = sys.m(), g = sys.g();
  if (prev.Q.rows() != n || prev.Q.cols() != n || prev.K.rows() != m || prev.K.cols() != n) {
    throw DimensionError("build_sca_lmi: iterate shapes do not match the system");
  }
  if (!(lmi::min_eigenvalue(prev.Q) > 0.0)) {
    throw std::invalid_argument("build_sca_lmi: linearization point Q is not positive definite");
  }
  const Eigen::MatrixXd Qt = lmi::symmetrize(prev.Q);
  const Eigen::MatrixXd In = Eigen::MatrixXd::Identity(n, n);
  const double delta = bounds.delta;

  ScaProblem sp;
  auto& prob = sp.problem;
  sp.Q = prob.add_symmetric("Q", n);
  sp.K = prob.add_matrix("K", m, n);
  sp.kappa = prob.add_scalar("kappa", delta, bounds.kappa_max);
  sp.epsilon = prob.add_scalar("epsilon", 0.0);
  sp.alpha = prob.add_scalar("alpha", delta, 1.0 - delta);
  sp.t = prob.add_scalar("t", 0.0);
  sp.w = prob.add_scalar("w", 0.0);

  const MatrixExpr q(sp.Q), k(sp.K), a(sp.alpha), e(sp.epsilon), w(sp.w), kap(sp.kappa);
  const MatrixExpr h = linearize_H(a, q, prev.alpha, Qt);
  const MatrixExpr f = linearize_F(e, w, prev.epsilon, prev.w);

  const MatrixExpr b11 = -q + 0.25 * h + f.times(0.25 * In);
  const MatrixExpr b31 = MatrixExpr::constant(Qt * sys.A()) - Eigen::MatrixXd(Qt * sys.B()) * k;
  const MatrixExpr b41 = 0.5 * (a.times(In) + q);
  const MatrixExpr b51 = (0.5 * (e + w)).times(In);
  const auto Z = [](int r, int c) { return MatrixExpr::zero(r, c); };
  const auto I = [](int r) { return MatrixExpr::identity(r); };
  const std::nullopt_t _ = std::nullopt;

  const MatrixExpr block = lmi::assemble_block({
      {b11, _, _, _, _},
      {Z(g, n), e.times(-Eigen::MatrixXd::Identity(g, g)), _, _, _},
      {b31, MatrixExpr::constant(Qt * sys.G()), MatrixExpr::constant(-2.0 * Qt) + q, _, _},
      {b41, Z(n, g), Z(n, n), -I(n), _},
      {b51, Z(n, g), Z(n, n), Z(n, n), -I(n)},
  });
  sp.block_size = block.rows();
  prob.add_lmi(block, Sense::kNsd, lmi::default_margin(block, delta), "sca block");

  const MatrixExpr gk = MatrixExpr::scalar(sys.gamma_x()) + sys.gamma_u() * kap;
  prob.add_lmi(lmi::assemble_block({{-w, _}, {gk, MatrixExpr::scalar(-1.0)}}), Sense::kNsd, 0.0,
               "w bound");
  prob.add_lmi(lmi::assemble_block({{kap.times(-Eigen::MatrixXd::Identity(m, m)), k},
                                    {_, kap.times(-In)}}),
               Sense::kNsd, 0.0, "gain norm");
  prob.add_lmi(q - MatrixExpr::constant(bounds.sigma * In), Sense::kPsd, 0.0, "Q >= sigma I");
  prob.add_lmi(q - MatrixExpr(sp.t).times(In), Sense::kNsd, 0.0, "Q <= t I");
  prob.minimize(sp.t);
  return sp;
}

namespace {

struct Start {
  Step1Result step1;
  Step2Result step2;
  double alpha1 = 0.0;
};

Start initialize(const system::LipschitzSystem& sys, const SynthesisConfig& cfg) {
  std::ostringstream tried;
  for (double alpha1 : {cfg.alpha_init, cfg.alpha_init / 10.0}) {
    Step1Result s1;
    try {
      s1 = step1_initial_lyapunov(sys, alpha1, cfg.rho, cfg.delta);
    } catch (const InfeasibleInitialization& e) {
      spdlog::info("step 1 infeasible at alpha={}: {}", alpha1, e.what());
      tried << " [step1 alpha=" << alpha1 << ": infeasible]";
      continue;
    }
    const Eigen::MatrixXd Q0 = s1.Q0();
    for (double kappa : cfg.kappa_retry_schedule) {
      auto s2 = step2_initial_gain(sys, Q0, kappa, cfg.delta);
      if (s2 && s2->certificate.valid()) {
        spdlog::info("initial point: step1 alpha={} kappa={} alpha0={} eps0={}", alpha1, kappa,
                     s2->alpha, s2->epsilon);
        return Start{s1, *s2, alpha1};
      }
      tried << " [alpha=" << alpha1 << " kappa=" << kappa << ": "
            << (s2 ? "certificate " + s2->certificate.summary() : std::string("infeasible"))
            << "]";
    }
  }
  throw InfeasibleInitialization("no feasible starting point;" + tried.str());
}

}  // namespace

ScaResult run_sca(const system::LipschitzSystem& sys, const SynthesisConfig& cfg) {
  cfg.validate();
  const Start start = initialize(sys, cfg);

  ScaResult res;
  res.step1 = start.step1;
  res.step2 = start.step2;
  res.step1_alpha = start.alpha1;

  ScaIterate prev;
  prev.Q = start.step1.Q0();
  prev.K = start.step2.K;
  prev.epsilon = start.step2.epsilon;
  prev.alpha = start.step2.alpha;
  prev.kappa = start.step2.kappa;
  const double gk = sys.gamma_x() + sys.gamma_u() * prev.kappa;
  prev.w = gk * gk + cfg.eps_small;
  prev.t = lmi::max_eigenvalue(prev.Q);
  res.history.push_back({0, prev});
  res.certificate = start.step2.certificate;
  res.final_iterate = prev;

  ScaBounds bounds;
  bounds.delta = cfg.delta;
  bounds.sigma = cfg.sigma;
  bounds.kappa_max =
      100.0 * *std::max_element(cfg.kappa_retry_schedule.begin(), cfg.kappa_retry_schedule.end());

  auto stop_with_warning = [&](const std::string& why) {
    res.warning = true;
    res.warning_message = why;
    spdlog::warn("SCA stopped early: {}", why);
  };

  for (int k = 1; k <= cfg.max_iter; ++k) {
    const ScaProblem sp = build_sca_lmi(sys, prev, bounds);
    lmi::SolveOptions opts;
    opts.initial_guess = sp.assignment(prev);
    const lmi::LmiSolution sol = lmi::solve(sp.problem, opts);
    if (!sol.ok()) {
      stop_with_warning("iteration " + std::to_string(k) + ": subproblem " +
                        lmi::to_string(sol.status) + " (" + sol.message + ")");
      break;
    }
    const ScaIterate it = sp.extract(sol.assignment);
    const FeasibilityCertificate cert =
        check_theorem1(sys, it.Q, it.K, it.epsilon, it.kappa, it.alpha);
    if (!cert.valid()) {
      stop_with_warning("iteration " + std::to_string(k) + ": certificate " + cert.summary());
      break;
    }
    if (it.t > prev.t + cfg.tol) {
      std::ostringstream os;
      os << "iteration " << k << ": objective rose from " << prev.t << " to " << it.t;
      stop_with_warning(os.str());
      break;
    }
    spdlog::debug("sca k={} t={} alpha={} eps={} w={} kappa={}", k, it.t, it.alpha, it.epsilon,
                  it.w, it.kappa);
    res.history.push_back({k, it});
    res.certificate = cert;
    res.final_iterate = it;
    if (std::abs(it.t - prev.t) < cfg.tol) {
      res.converged = true;
      break;
    }
    prev = it;
  }
  res.K = res.final_iterate.K;
  spdlog::info("SCA finished after {} iterations, t={} ({})", res.history.size() - 1,
               res.final_iterate.t, res.converged ? "converged" : "iteration limit or early stop");
  return res;
}

}  // namespace lipsyn::synthesis
