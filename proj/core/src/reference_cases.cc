#include "lipsyn/reference_cases.h"

#include <stdexcept>

#include "lipsyn/system/nonlinearity.h"

namespace lipsyn {

namespace {

Eigen::MatrixXd row(std::initializer_list<double> v) {
  Eigen::MatrixXd m(1, static_cast<int>(v.size()));
  int i = 0;
  for (double x : v) m(0, i++) = x;
  return m;
}

system::ContinuousSystem make_continuous(Eigen::MatrixXd A, Eigen::MatrixXd B,
                                         Eigen::MatrixXd C, const std::string& f_name,
                                         double gamma_x, double gamma_u) {
  const int n = static_cast<int>(A.rows());
  const Eigen::MatrixXd G = Eigen::MatrixXd::Identity(n, n);
  system::NonlinearityParams p{n, static_cast<int>(B.cols()), n, gamma_x, gamma_u};
  auto f = system::NonlinearityRegistry::global().make(f_name, p);
  return system::ContinuousSystem(std::move(A), std::move(B), G, std::move(C), std::move(f),
                                  gamma_x, gamma_u, f_name);
}

}  // namespace

system::ContinuousSystem example1_continuous() {
  Eigen::MatrixXd A(2, 2);
  A << -2, 3, 3, 1;
  Eigen::MatrixXd B(2, 1);
  B << 0, 1;
  return make_continuous(A, B, row({1, 0}), "example1_cosine", 1.0, 0.1);
}

system::ContinuousSystem example2_continuous() {
  Eigen::MatrixXd A(4, 4);
  A << 0, 1, 0, 0,  //
      -48.6, -1.25, 48.6, 0,  //
      0, 0, 0, 1,  //
      1.95, 0, -1.95, 0;
  Eigen::MatrixXd B(4, 1);
  B << 0, 21.6, 0, 0;
  return make_continuous(A, B, row({0, 0, 1, 0}), "example2_sine", 0.25, 0.0);
}

ReferenceCase example1_case(bool tracking) {
  const double T = 0.01;
  auto cont = example1_continuous();
  auto plant = system::euler_discretize(cont, T);
  synthesis::SynthesisConfig cfg;
  cfg.rho = -20.0;
  cfg.eps_small = 0.01;
  cfg.tol = 1e-6;
  cfg.max_iter = 50;
  Eigen::VectorXd x0(2);
  x0 << -2, -1;
  ReferenceCase rc{tracking ? "example1_tracking" : "example1", cont, T, plant,
                   std::nullopt, cfg, x0, 5000, {}, {}, 0};
  if (tracking) {
    rc.tracking = system::TrackingSpec{system::default_tracking_gain(1),
                                       Eigen::VectorXd::Constant(1, -1.5)};
    rc.config.alpha_init = 7e-3;
    rc.config.kappa0 = 40.0;
    rc.published_gain_printed = row({-7.3724, -3.6017, -36.5141});
  } else {
    rc.config.alpha_init = 1e-2;
    rc.config.kappa0 = 10.0;
    rc.published_gain_printed = row({-8.7744, -4.7690});
  }
  rc.config.kappa_retry_schedule = synthesis::default_kappa_schedule(rc.config.kappa0);
  rc.published_gain = -rc.published_gain_printed;
  return rc;
}

ReferenceCase example2_case(bool tracking) {
  const double T = 0.001;
  auto cont = example2_continuous();
  auto plant = system::euler_discretize(cont, T);
  synthesis::SynthesisConfig cfg;
  cfg.rho = -5.0;
  cfg.kappa0 = 1.0;
  cfg.kappa_retry_schedule = synthesis::default_kappa_schedule(1.0);
  cfg.eps_small = 0.01;
  cfg.tol = 1e-6;
  cfg.max_iter = 50;
  // At rho = -5 the starting Lyapunov matrix has entries near 1e-2 and the
  // decay slack alpha * lambda_min(Q) is near 1e-9, below the default margin.
  cfg.delta = 1e-10;
  Eigen::VectorXd x0(4);
  x0 << -1.5, 1, 0.5, -2;
  ReferenceCase rc{tracking ? "example2_tracking" : "example2", cont, T, plant,
                   std::nullopt, cfg, x0, 40000, {}, {}, 2};
  if (tracking) {
    rc.tracking = system::TrackingSpec{system::default_tracking_gain(1),
                                       Eigen::VectorXd::Constant(1, 1.5)};
    rc.config.alpha_init = 1e-4;
    rc.published_gain_printed = row({-6.9611, -0.7264, 4.3826, -0.3681, -0.7463});
  } else {
    rc.config.alpha_init = 1e-3;
    rc.published_gain_printed = row({-25.8500, -0.9142, 16.7354, -4.1012});
  }
  rc.published_gain = -rc.published_gain_printed;
  return rc;
}

ReferenceCase reference_case(const std::string& id, bool tracking) {
  if (id == "example1") return example1_case(tracking);
  if (id == "example2") return example2_case(tracking);
  throw std::out_of_range("unknown example '" + id + "' (expected example1 or example2)");
}

}  // namespace lipsyn
