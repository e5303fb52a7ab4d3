#pragma once

#include <optional>
#include <string>

#include "lipsyn/synthesis/types.h"
#include "lipsyn/system/lipschitz_system.h"
#include "lipsyn/system/system_io.h"

namespace lipsyn {

/// Built-in benchmark plants.
///
/// example1: 2-state unstable plant, gamma_x = 1, gamma_u = 0.1, T = 0.01.
/// example2: 4-state flexible-link arm, gamma_x = 0.25, gamma_u = 0, T = 0.001.
struct ReferenceCase {
  std::string id;
  system::ContinuousSystem continuous;
  double T;
  system::LipschitzSystem plant;  // Euler-discretized
  std::optional<system::TrackingSpec> tracking;
  synthesis::SynthesisConfig config;
  Eigen::VectorXd x0;
  int steps;
  /// Published gain as printed, and the same gain in the u = -K x
  /// convention used throughout this library (the printed gains act as
  /// u = +K x).
  Eigen::MatrixXd published_gain_printed;
  Eigen::MatrixXd published_gain;
  /// Index of the tracked state channel when tracking.
  int tracked_state = 0;
};

system::ContinuousSystem example1_continuous();
system::ContinuousSystem example2_continuous();

ReferenceCase example1_case(bool tracking);
ReferenceCase example2_case(bool tracking);

/// id is "example1" or "example2". Throws std::out_of_range otherwise.
ReferenceCase reference_case(const std::string& id, bool tracking);

}  // namespace lipsyn
