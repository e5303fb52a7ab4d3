#include <cmath>

#include <gtest/gtest.h>
#include <unsupported/Eigen/MatrixFunctions>

#include "lipsyn/errors.h"
#include "lipsyn/reference_cases.h"
#include "lipsyn/simulation/simulate.h"
#include "lipsyn/synthesis/sca.h"
#include "lipsyn/system/nonlinearity.h"
#include "lipsyn/system/system_io.h"
#include "properties.h"

namespace lipsyn::system {
namespace {

Eigen::MatrixXd mat(std::initializer_list<std::initializer_list<double>> rows) {
  Eigen::MatrixXd m(rows.size(), rows.begin()->size());
  int i = 0;
  for (const auto& r : rows) {
    int j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

Nonlinearity zero_f(int g) {
  return [g](const Eigen::VectorXd&, const Eigen::VectorXd&) { return Eigen::VectorXd::Zero(g).eval(); };
}

TEST(EulerDiscretize, FirstExampleMatrices) {
  const auto d = euler_discretize(example1_continuous(), 0.01);
  EXPECT_LE((d.A() - mat({{0.98, 0.03}, {0.03, 1.01}})).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LE((d.G() - 0.01 * Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LE((d.B() - mat({{0}, {0.01}})).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_EQ(d.C(), example1_continuous().C());
  EXPECT_EQ(d.gamma_x(), 1.0);
  EXPECT_EQ(d.gamma_u(), 0.1);
}

TEST(EulerDiscretize, NonPositiveStepThrows) {
  EXPECT_THROW(euler_discretize(example1_continuous(), 0.0), std::invalid_argument);
  EXPECT_THROW(euler_discretize(example1_continuous(), -1.0), std::invalid_argument);
}

TEST(EulerDiscretize, LinearPartErrorHalvesWithStep) {
  const auto cont = example1_continuous();
  const double horizon = 1.0;
  const Eigen::Vector2d x0(-2, -1);
  const Eigen::VectorXd exact = (cont.A() * horizon).exp() * x0;
  auto error = [&](double T) {
    const int N = static_cast<int>(std::lround(horizon / T));
    const Eigen::MatrixXd Ad = Eigen::MatrixXd::Identity(2, 2) + T * cont.A();
    Eigen::VectorXd x = x0;
    for (int k = 0; k < N; ++k) x = Ad * x;
    return (x - exact).norm();
  };
  const double ratio = error(0.01) / error(0.005);
  EXPECT_NEAR(ratio, 2.0, 0.4);
}

TEST(AugmentForTracking, FirstExampleMatrices) {
  const auto rc = example1_case(false);
  const auto aug = augment_for_tracking(rc.plant, 1e-3 * Eigen::MatrixXd::Identity(1, 1),
                                        Eigen::VectorXd::Constant(1, -1.5));
  const auto& s = aug.system();
  EXPECT_EQ(s.n(), 3);
  EXPECT_LE((s.A() - mat({{0.98, 0.03, 0}, {0.03, 1.01, 0}, {1e-3, 0, 1}})).cwiseAbs().maxCoeff(),
            1e-15);
  EXPECT_LE((s.B() - mat({{0}, {0.01}, {0}})).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LE((s.G() - mat({{0.01, 0, 0}, {0, 0.01, 0}, {0, 0, 1e-3}})).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_EQ(s.gamma_x(), rc.plant.gamma_x());
  EXPECT_EQ(s.gamma_u(), rc.plant.gamma_u());
  const Eigen::VectorXd ft = s.f(Eigen::Vector3d(0.3, -0.2, 5.0), Eigen::VectorXd::Constant(1, 0.7));
  EXPECT_DOUBLE_EQ(ft(2), 1.5);
  EXPECT_EQ(ft.head(2), rc.plant.f(Eigen::Vector2d(0.3, -0.2), Eigen::VectorXd::Constant(1, 0.7)));
}

TEST(AugmentForTracking, ZeroGainFreezesIntegrator) {
  const auto rc = example1_case(false);
  const auto aug = augment_for_tracking(rc.plant, Eigen::MatrixXd::Zero(1, 1),
                                        Eigen::VectorXd::Constant(1, -1.5));
  Eigen::VectorXd x(3);
  x << -2, -1, 0.25;
  for (int k = 0; k < 50; ++k) {
    x = aug.system().step(x, Eigen::VectorXd::Zero(1));
    EXPECT_EQ(x(2), 0.25);
  }
}

TEST(AugmentForTracking, WrongSizesThrow) {
  const auto rc = example1_case(false);
  EXPECT_THROW(augment_for_tracking(rc.plant, Eigen::MatrixXd::Identity(1, 1), Eigen::VectorXd::Zero(2)),
               DimensionError);
  EXPECT_THROW(augment_for_tracking(rc.plant, Eigen::MatrixXd::Identity(2, 2), Eigen::VectorXd::Zero(1)),
               DimensionError);
}

TEST(AugmentForTracking, AugmentedSystemIsAcceptedBySynthesis) {
  // Stable plant with no nonlinearity: any augmented gain problem builds.
  const LipschitzSystem base(mat({{0.5}}), mat({{1}}), mat({{1}}), mat({{1}}), zero_f(1), 0.0, 0.0);
  const auto aug = augment_for_tracking(base, 1e-3 * Eigen::MatrixXd::Identity(1, 1),
                                        Eigen::VectorXd::Constant(1, 0.0));
  synthesis::ScaIterate it;
  it.Q = Eigen::MatrixXd::Identity(2, 2);
  it.K = Eigen::MatrixXd::Zero(1, 2);
  it.epsilon = 1.0;
  it.alpha = 0.1;
  it.kappa = 1.0;
  it.w = 0.01;
  it.t = 1.0;
  const auto sp = synthesis::build_sca_lmi(aug.system(), it);
  EXPECT_EQ(sp.block_size, 2 + 2 + 2 + 2 + 2);
}

TEST(EffectiveLipschitz, Examples) {
  EXPECT_DOUBLE_EQ(effective_lipschitz(1.0, 0.1, 10.0), 2.0);
  EXPECT_DOUBLE_EQ(effective_lipschitz(0.7, 0.0, 123.0), 0.7);
  EXPECT_DOUBLE_EQ(effective_lipschitz(0.25, 0.0, 1.0), 0.25);
  EXPECT_THROW(effective_lipschitz(-1.0, 0.0, 1.0), std::invalid_argument);
  EXPECT_THROW(effective_lipschitz(1.0, -0.1, 1.0), std::invalid_argument);
  EXPECT_THROW(effective_lipschitz(1.0, 0.1, 0.0), std::invalid_argument);
}

TEST(SampleLipschitz, ZeroNonlinearity) {
  const LipschitzSystem s(mat({{1}}), mat({{1}}), mat({{1}}), mat({{1}}), zero_f(1), 0.0, 0.0);
  const auto est = sample_lipschitz_estimate(s, 200, 1);
  EXPECT_EQ(est.gamma_x, 0.0);
  EXPECT_EQ(est.gamma_u, 0.0);
}

TEST(SampleLipschitz, FirstExampleWithinBounds) {
  const auto rc = example1_case(false);
  const auto est = sample_lipschitz_estimate(rc.plant, 2000, 3);
  EXPECT_LE(est.gamma_x, 1.0 + 1e-9);
  EXPECT_LE(est.gamma_u, 0.1 + 1e-9);
  EXPECT_GT(est.gamma_x, 0.5);
}

TEST(SampleLipschitz, LinearSlopeApproached) {
  auto f = [](const Eigen::VectorXd& x, const Eigen::VectorXd&) { return (2.0 * x).eval(); };
  const LipschitzSystem s(mat({{1}}), mat({{1}}), mat({{1}}), mat({{1}}), f, 2.0, 0.0);
  const auto est = sample_lipschitz_estimate(s, 500, 5);
  EXPECT_NEAR(est.gamma_x, 2.0, 1e-9);
  const auto again = sample_lipschitz_estimate(s, 500, 5);
  EXPECT_EQ(est.gamma_x, again.gamma_x);
}

TEST(LipschitzSystem, SampledBoundsHoldForBuiltins) {
  for (const auto& rc : {example1_case(false), example2_case(false)}) {
    testing::Rng rng(19);
    const auto& s = rc.plant;
    for (int i = 0; i < 1000; ++i) {
      const Eigen::VectorXd x1 = testing::random_matrix(rng, s.n(), 1, 5.0);
      const Eigen::VectorXd x2 = testing::random_matrix(rng, s.n(), 1, 5.0);
      const Eigen::VectorXd u1 = testing::random_matrix(rng, s.m(), 1, 5.0);
      const Eigen::VectorXd u2 = testing::random_matrix(rng, s.m(), 1, 5.0);
      EXPECT_LE((s.f(x1, u1) - s.f(x2, u1)).norm(), (1 + 1e-9) * s.gamma_x() * (x1 - x2).norm());
      EXPECT_LE((s.f(x1, u1) - s.f(x1, u2)).norm(), (1 + 1e-9) * s.gamma_u() * (u1 - u2).norm());
    }
  }
}

TEST(LipschitzSystem, RejectsBadShapesAndConstants) {
  EXPECT_THROW(LipschitzSystem(mat({{1, 0}}), mat({{1}}), mat({{1}}), mat({{1}}), zero_f(1), 0, 0),
               DimensionError);
  EXPECT_THROW(LipschitzSystem(mat({{1}}), mat({{1}, {1}}), mat({{1}}), mat({{1}}), zero_f(1), 0, 0),
               DimensionError);
  EXPECT_THROW(LipschitzSystem(mat({{1}}), mat({{1}}), mat({{1}}), mat({{1}}), zero_f(1), -1, 0),
               std::invalid_argument);
}

TEST(EquilibriumResidual, StoredNotAssumed) {
  const auto rc = example1_case(false);
  const Eigen::Vector2d x(0.1, 0.2);
  const Eigen::VectorXd u = Eigen::VectorXd::Constant(1, 0.3);
  const double expected = (x - rc.plant.step(x, u)).norm();
  EXPECT_DOUBLE_EQ(equilibrium_residual(rc.plant, x, u), expected);
  EXPECT_GT(expected, 0.0);
}

TEST(SystemFile, ParsesContinuousWithTracking) {
  const std::string text = R"({
    "A": [[-2, 3], [3, 1]], "B": [[0], [1]], "C": [[1, 0]],
    "gamma_x": 1, "gamma_u": 0.1, "f_name": "example1_cosine",
    "continuous": true, "T": 0.01,
    "tracking": {"r": [-1.5]}
  })";
  const auto sf = parse_system(text);
  EXPECT_TRUE(sf.was_continuous);
  EXPECT_NEAR(sf.system.A()(0, 0), 0.98, 1e-15);
  EXPECT_NEAR(sf.system.G()(1, 1), 0.01, 1e-15);
  ASSERT_TRUE(sf.tracking.has_value());
  EXPECT_DOUBLE_EQ(sf.tracking->E(0, 0), 1e-3);
  EXPECT_DOUBLE_EQ(sf.tracking->r(0), -1.5);
}

TEST(SystemFile, RoundTrip) {
  const auto rc = example2_case(true);
  const auto sf = parse_system(system_to_json(rc.plant, rc.tracking));
  EXPECT_LE((sf.system.A() - rc.plant.A()).cwiseAbs().maxCoeff(), 1e-11);
  EXPECT_EQ(sf.system.f_name(), "example2_sine");
  ASSERT_TRUE(sf.tracking.has_value());
  EXPECT_DOUBLE_EQ(sf.tracking->r(0), rc.tracking->r(0));
}

TEST(SystemFile, Errors) {
  EXPECT_THROW(parse_system("{not json"), ParseError);
  EXPECT_THROW(parse_system(R"({"A": [[1]], "B": [[1]], "C": [[1]], "gamma_x": 0, "gamma_u": 0})"),
               ParseError);
  EXPECT_THROW(parse_system(R"({"A": [[1]], "B": [[1]], "C": [[1]], "gamma_x": 0, "gamma_u": 0,
                                "f_name": "nope"})"),
               ParseError);
  EXPECT_THROW(parse_system(R"({"A": [[1, 2]], "B": [[1]], "C": [[1]], "gamma_x": 0,
                                "gamma_u": 0, "f_name": "zero"})"),
               DimensionError);
}

}  // namespace
}  // namespace lipsyn::system
