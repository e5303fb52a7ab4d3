#include "lipsyn/simulation/simulate.h"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "lipsyn/errors.h"

namespace lipsyn::simulation {

namespace {

Trajectory rollout(const system::LipschitzSystem& sys, const Eigen::MatrixXd& K,
                   const Eigen::VectorXd& x0, int N) {
  if (N < 1) throw std::invalid_argument("simulation needs at least one step");
  if (K.rows() != sys.m() || K.cols() != sys.n()) {
    std::ostringstream os;
    os << "gain is " << K.rows() << "x" << K.cols() << " but the system needs " << sys.m()
       << "x" << sys.n();
    throw DimensionError(os.str());
  }
  if (x0.size() != sys.n()) {
    throw DimensionError("initial state has length " + std::to_string(x0.size()) +
                         ", expected " + std::to_string(sys.n()));
  }
  Trajectory tr;
  tr.states.resize(N + 1, sys.n());
  tr.inputs.resize(N, sys.m());
  tr.outputs.resize(N + 1, sys.p());
  Eigen::VectorXd x = x0;
  for (int k = 0; k <= N; ++k) {
    if (!x.allFinite() || x.norm() > kDivergenceBound) {
      throw DivergenceError("state diverged at step " + std::to_string(k), k);
    }
    tr.states.row(k) = x.transpose();
    tr.outputs.row(k) = sys.output(x).transpose();
    if (k == N) break;
    const Eigen::VectorXd u = -K * x;
    tr.inputs.row(k) = u.transpose();
    x = sys.step(x, u);
  }
  return tr;
}

}  // namespace

Trajectory simulate_closed_loop(const system::LipschitzSystem& sys, const Eigen::MatrixXd& K,
                                const Eigen::VectorXd& x0, int N) {
  return rollout(sys, K, x0, N);
}

Trajectory simulate_tracking(const system::AugmentedSystem& aug, const Eigen::MatrixXd& K,
                             const Eigen::VectorXd& x0, int N) {
  const auto& sys = aug.system();
  const int n = aug.base().n();
  Eigen::VectorXd start;
  if (x0.size() == sys.n()) {
    start = x0;
  } else if (x0.size() == n) {
    start = Eigen::VectorXd::Zero(sys.n());
    start.head(n) = x0;
  } else {
    throw DimensionError("initial state has length " + std::to_string(x0.size()) +
                         ", expected " + std::to_string(n) + " or " + std::to_string(sys.n()));
  }
  Trajectory tr = rollout(sys, K, start, N);
  tr.reference = aug.reference();
  return tr;
}

}  // namespace lipsyn::simulation
