#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "lipsyn/errors.h"
#include "lipsyn/lmi/linalg.h"
#include "lipsyn/reference_cases.h"
#include "lipsyn/simulation/analysis.h"
#include "lipsyn/simulation/simulate.h"
#include "lipsyn/simulation/trajectory_csv.h"
#include "lipsyn/synthesis/sca.h"
#include "properties.h"

namespace lipsyn::simulation {
namespace {

using system::LipschitzSystem;

Eigen::MatrixXd scalar(double v) { return Eigen::MatrixXd::Constant(1, 1, v); }

LipschitzSystem scalar_plant() {
  auto f = [](const Eigen::VectorXd&, const Eigen::VectorXd&) { return Eigen::VectorXd::Zero(1).eval(); };
  return LipschitzSystem(scalar(0.5), scalar(1), scalar(0), scalar(1), f, 0.0, 0.0, "zero");
}

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(v.size());
  int i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

TEST(SimulateClosedLoop, NilpotentZeroesInOneStep) {
  auto f = [](const Eigen::VectorXd&, const Eigen::VectorXd&) { return Eigen::VectorXd::Zero(2).eval(); };
  const LipschitzSystem s(Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd::Ones(2, 1),
                          Eigen::MatrixXd::Identity(2, 2), Eigen::MatrixXd::Identity(1, 2), f, 0, 0);
  const auto tr = simulate_closed_loop(s, Eigen::MatrixXd::Zero(1, 2), vec({3, -7}), 4);
  EXPECT_EQ(tr.state(1), Eigen::VectorXd::Zero(2));
}

TEST(SimulateClosedLoop, ScalarPole) {
  const auto tr = simulate_closed_loop(scalar_plant(), scalar(0.25), vec({1}), 30);
  ASSERT_EQ(tr.states.rows(), 31);
  ASSERT_EQ(tr.inputs.rows(), 30);
  ASSERT_EQ(tr.outputs.rows(), 31);
  for (int k = 0; k <= 30; ++k) EXPECT_NEAR(tr.states(k, 0), std::pow(0.25, k), 1e-15);
  for (int k = 0; k < 30; ++k) EXPECT_EQ(tr.inputs(k, 0), -0.25 * tr.states(k, 0));
  EXPECT_EQ(tr.outputs.col(0), tr.states.col(0));
}

TEST(SimulateClosedLoop, Errors) {
  EXPECT_THROW(simulate_closed_loop(scalar_plant(), scalar(0.25), vec({1}), 0), std::invalid_argument);
  EXPECT_THROW(simulate_closed_loop(scalar_plant(), Eigen::MatrixXd::Zero(1, 2), vec({1}), 5),
               DimensionError);
  EXPECT_THROW(simulate_closed_loop(scalar_plant(), scalar(0.25), vec({1, 2}), 5), DimensionError);
  try {
    simulate_closed_loop(scalar_plant(), scalar(-3.0), vec({1}), 100);
    FAIL() << "expected divergence";
  } catch (const DivergenceError& e) {
    // |x[k]| = 3.5^k first exceeds 1e9 at k = 17.
    EXPECT_EQ(e.step(), 17);
  }
}

TEST(SimulateClosedLoop, PublishedFirstGainSettlesToNonzeroPoint) {
  const auto rc = example1_case(false);
  const auto tr = simulate_closed_loop(rc.plant, rc.published_gain, rc.x0, rc.steps);
  const auto eq = estimate_equilibrium(rc.plant, tr);
  EXPECT_GT(eq.x_eq.norm(), 1e-3);
  EXPECT_LE(eq.residual, 1e-6);
  EXPECT_LE((tr.final_state() - eq.x_eq).norm(), 1e-3);
}

TEST(SimulateClosedLoop, Deterministic) {
  const auto rc = example2_case(false);
  const auto a = simulate_closed_loop(rc.plant, rc.published_gain, rc.x0, 3000);
  const auto b = simulate_closed_loop(rc.plant, rc.published_gain, rc.x0, 3000);
  EXPECT_TRUE(a.states == b.states);
  EXPECT_TRUE(a.inputs == b.inputs);
}

TEST(SimulateTracking, FirstExamplePublishedGain) {
  const auto rc = example1_case(true);
  const auto aug = system::augment_for_tracking(rc.plant, rc.tracking->E, rc.tracking->r);
  const auto tr = simulate_tracking(aug, rc.published_gain, rc.x0, rc.steps);
  EXPECT_EQ(tr.states.cols(), 3);
  EXPECT_EQ(tr.state(0)(2), 0.0);
  EXPECT_EQ(tr.reference(0), -1.5);
  EXPECT_NEAR(tr.states(rc.steps, 0), -1.5, 0.05);
}

TEST(SimulateTracking, IntegratorBookkeeping) {
  const auto rc = example1_case(true);
  const auto aug = system::augment_for_tracking(rc.plant, rc.tracking->E, rc.tracking->r);
  const auto tr = simulate_tracking(aug, rc.published_gain, rc.x0, 2000);
  const double E = rc.tracking->E(0, 0), r = rc.tracking->r(0);
  for (int k = 0; k < 2000; ++k) {
    const double expected = tr.states(k, 2) + E * (tr.outputs(k, 0) - r);
    EXPECT_LE(std::abs(tr.states(k + 1, 2) - expected), 1e-10);
  }
}

TEST(SimulateTracking, AlreadyOnTarget) {
  // Stable linear plant at rest with r = C x0: everything stays put.
  auto f = [](const Eigen::VectorXd&, const Eigen::VectorXd&) { return Eigen::VectorXd::Zero(1).eval(); };
  const LipschitzSystem s(scalar(1), scalar(1), scalar(1), scalar(1), f, 0, 0, "zero");
  const auto aug = system::augment_for_tracking(s, scalar(1e-3), vec({0.0}));
  Eigen::MatrixXd K(1, 2);
  K << 0.5, 0.1;
  const auto tr = simulate_tracking(aug, K, vec({0.0}), 100);
  EXPECT_EQ(tr.states.cwiseAbs().maxCoeff(), 0.0);
}

TEST(SimulateTracking, FullAugmentedStateAccepted) {
  const auto rc = example1_case(true);
  const auto aug = system::augment_for_tracking(rc.plant, rc.tracking->E, rc.tracking->r);
  const auto tr = simulate_tracking(aug, rc.published_gain, vec({-2, -1, 0.5}), 10);
  EXPECT_EQ(tr.state(0)(2), 0.5);
  EXPECT_THROW(simulate_tracking(aug, rc.published_gain, vec({1, 2, 3, 4}), 10), DimensionError);
}

TEST(LyapunovSequence, Examples) {
  const auto tr = simulate_closed_loop(scalar_plant(), scalar(0.25), vec({1}), 20);
  const auto v = lyapunov_sequence(tr, scalar(1), vec({0}));
  for (int k = 0; k <= 20; ++k) EXPECT_NEAR(v[k], std::pow(0.25, 2 * k), 1e-15);

  Trajectory flat;
  flat.states = Eigen::MatrixXd::Constant(5, 2, 0.3);
  flat.inputs = Eigen::MatrixXd::Zero(4, 1);
  flat.outputs = Eigen::MatrixXd::Zero(5, 1);
  for (double x : lyapunov_sequence(flat, Eigen::MatrixXd::Identity(2, 2), vec({0.3, 0.3})))
    EXPECT_EQ(x, 0.0);

  const auto rc = example1_case(false);
  const auto t1 = simulate_closed_loop(rc.plant, rc.published_gain, rc.x0, 50);
  const auto v1 = lyapunov_sequence(t1, Eigen::MatrixXd::Identity(2, 2), Eigen::VectorXd::Zero(2));
  for (int k = 0; k <= 50; ++k) EXPECT_NEAR(v1[k], t1.state(k).squaredNorm(), 1e-14);
}

TEST(LyapunovSequence, AsymmetricQRejected) {
  const auto tr = simulate_closed_loop(scalar_plant(), scalar(0.25), vec({1}), 5);
  Trajectory t2;
  t2.states = Eigen::MatrixXd::Ones(3, 2);
  Eigen::MatrixXd Q(2, 2);
  Q << 1, 0.5, 0, 1;
  EXPECT_THROW(lyapunov_sequence(t2, Q, vec({0, 0})), std::invalid_argument);
  EXPECT_THROW(lyapunov_sequence(tr, Eigen::MatrixXd::Identity(2, 2), vec({0})), DimensionError);
}

TEST(EstimateEquilibrium, ConstantTrajectory) {
  const auto s = scalar_plant();
  Trajectory tr;
  tr.states = Eigen::MatrixXd::Constant(11, 1, 2.0);
  tr.inputs = Eigen::MatrixXd::Constant(10, 1, -1.0);
  tr.outputs = tr.states;
  const auto eq = estimate_equilibrium(s, tr);
  EXPECT_EQ(eq.x_eq(0), 2.0);
  EXPECT_EQ(eq.u_eq(0), -1.0);
  EXPECT_DOUBLE_EQ(eq.residual, std::abs(2.0 - (0.5 * 2.0 - 1.0)));
}

TEST(EstimateEquilibrium, OscillationRejected) {
  Trajectory tr;
  tr.states.resize(101, 1);
  for (int k = 0; k <= 100; ++k) tr.states(k, 0) = (k % 2) ? 1.0 : -1.0;
  tr.inputs = Eigen::MatrixXd::Zero(100, 1);
  tr.outputs = tr.states;
  try {
    estimate_equilibrium(scalar_plant(), tr);
    FAIL() << "expected NotConvergedError";
  } catch (const NotConvergedError& e) {
    EXPECT_NEAR(e.tail_variance(), 1.0, 0.1);
  }
}

TEST(FitExponentialDecay, ExactGeometric) {
  Trajectory tr;
  tr.states.resize(60, 1);
  for (int k = 0; k < 60; ++k) tr.states(k, 0) = std::pow(0.9, k);
  const auto fit = fit_exponential_decay(tr, vec({0}));
  EXPECT_NEAR(fit.rate, 0.9, 1e-9);
  EXPECT_NEAR(fit.prefactor, 1.0, 1e-9);
  EXPECT_FALSE(fit.degenerate);
}

TEST(FitExponentialDecay, ScalarClosedLoop) {
  const auto tr = simulate_closed_loop(scalar_plant(), scalar(0.25), vec({1}), 40);
  const auto fit = fit_exponential_decay(tr, vec({0}));
  EXPECT_NEAR(fit.rate, 0.25, 1e-6);
  // Fitting stops where the error drops below 1e-9.
  EXPECT_EQ(fit.samples, 15);
  const Eigen::VectorXd e = error_norms(tr, vec({0}));
  for (int k = 0; k < fit.samples; ++k)
    EXPECT_LE(e(k), fit.prefactor * std::pow(fit.rate, k) * e(0) + fit.max_violation + 1e-15);
}

TEST(FitExponentialDecay, DegenerateAndBadInput) {
  Trajectory zero;
  zero.states = Eigen::MatrixXd::Zero(10, 2);
  const auto fit = fit_exponential_decay(zero, vec({0, 0}));
  EXPECT_TRUE(fit.degenerate);
  EXPECT_EQ(fit.rate, 0.0);
  Trajectory late;
  late.states = Eigen::MatrixXd::Zero(10, 1);
  late.states(5, 0) = 1.0;
  EXPECT_THROW(fit_exponential_decay(late, vec({0})), std::invalid_argument);
}

TEST(PeaksNonincreasing, Envelope) {
  Eigen::VectorXd damped(400), growing(400);
  for (int k = 0; k < 400; ++k) {
    damped(k) = std::exp(-0.01 * k) * std::sin(0.3 * k);
    growing(k) = std::exp(0.01 * k) * std::sin(0.3 * k);
  }
  EXPECT_TRUE(peaks_nonincreasing(damped, 0));
  EXPECT_FALSE(peaks_nonincreasing(growing, 0));
}

TEST(TrajectoryCsv, HeaderAndRows) {
  const auto tr = simulate_closed_loop(scalar_plant(), scalar(0.25), vec({1.0 / 3.0}), 2);
  std::ostringstream os;
  write_trajectory_csv(tr, os);
  EXPECT_EQ(os.str(),
            "k,x1,u1,y1\n"
            "0,0.333333333333,-0.0833333333333,0.333333333333\n"
            "1,0.0833333333333,-0.0208333333333,0.0833333333333\n"
            "2,0.0208333333333,,0.0208333333333\n");
}

// Properties along synthesized closed loops.
class CertifiedLoop : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    rc_ = new ReferenceCase(example1_case(false));
    res_ = new synthesis::ScaResult(synthesis::run_sca(rc_->plant, rc_->config));
  }
  static void TearDownTestSuite() {
    delete res_;
    delete rc_;
  }
  static ReferenceCase* rc_;
  static synthesis::ScaResult* res_;
};
ReferenceCase* CertifiedLoop::rc_ = nullptr;
synthesis::ScaResult* CertifiedLoop::res_ = nullptr;

TEST_F(CertifiedLoop, LyapunovDecrease) {
  ASSERT_TRUE(res_->certificate.valid());
  const auto& it = res_->final_iterate;
  testing::Rng rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::VectorXd x0 = testing::random_matrix(rng, 2, 1, 2.0);
    const auto tr = simulate_closed_loop(rc_->plant, res_->K, x0, rc_->steps);
    const auto eq = estimate_equilibrium(rc_->plant, tr);
    const auto v = lyapunov_sequence(tr, it.Q, eq.x_eq);
    for (std::size_t k = 0; k + 1 < v.size(); ++k)
      ASSERT_LE(v[k + 1], (1 - it.alpha) * v[k] + 1e-8 * (1 + v[k])) << "trial " << trial << " k " << k;
  }
}

TEST_F(CertifiedLoop, DecayEnvelope) {
  const auto tr = simulate_closed_loop(rc_->plant, res_->K, rc_->x0, rc_->steps);
  const auto eq = estimate_equilibrium(rc_->plant, tr);
  const auto fit = fit_exponential_decay(tr, eq.x_eq);
  EXPECT_LE(fit.rate, std::sqrt(1 - res_->final_iterate.alpha) + 0.05);
}

TEST_F(CertifiedLoop, LipschitzChainBound) {
  const auto tr = simulate_closed_loop(rc_->plant, res_->K, rc_->x0, rc_->steps);
  const auto eq = estimate_equilibrium(rc_->plant, tr);
  const double bound_gain = rc_->plant.gamma_x() + rc_->plant.gamma_u() * lmi::spectral_norm(res_->K);
  const Eigen::VectorXd u_eq = -res_->K * eq.x_eq;
  const Eigen::VectorXd f_eq = rc_->plant.f(eq.x_eq, u_eq);
  for (int k = 0; k < tr.steps(); ++k) {
    const Eigen::VectorXd x = tr.state(k), u = tr.inputs.row(k).transpose();
    EXPECT_LE((rc_->plant.f(x, u) - f_eq).norm(), bound_gain * (x - eq.x_eq).norm() + 1e-9);
  }
}

}  // namespace
}  // namespace lipsyn::simulation
