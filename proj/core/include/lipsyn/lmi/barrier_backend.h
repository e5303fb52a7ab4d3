#pragma once

#include "lipsyn/lmi/conic_problem.h"

namespace lipsyn::lmi {

/// Dense primal log-det barrier method with a phase-I feasibility search.
/// With a zero cost vector it returns (an approximation of) the analytic
/// center of the feasible set.
class BarrierBackend final : public SdpBackend {
 public:
  BackendResult solve(const ConicProblem& problem,
                      const std::optional<Eigen::VectorXd>& start,
                      const BackendOptions& options) const override;
};

}  // namespace lipsyn::lmi
