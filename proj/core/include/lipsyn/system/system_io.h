#pragma once

#include <optional>
#include <string>

#include "lipsyn/system/lipschitz_system.h"
#include "lipsyn/system/nonlinearity.h"

namespace lipsyn::system {

struct TrackingSpec {
  Eigen::MatrixXd E;
  Eigen::VectorXd r;
};

/// Parsed system definition. `system` is always discrete-time; a file with
/// `"continuous": true` has already been discretized with its `T`.
struct SystemFile {
  LipschitzSystem system;
  std::optional<TrackingSpec> tracking;
  bool was_continuous = false;
  double T = 0.0;
};

/// Default integrator gain E = 1e-3 * I.
Eigen::MatrixXd default_tracking_gain(int p);

/// JSON fields: A, B, G (default I), C, gamma_x, gamma_u, f_name, optional
/// continuous + T, optional tracking {E (default 1e-3 I), r}.
/// Throws ParseError on malformed input, DimensionError on shape conflicts.
SystemFile parse_system(const std::string& json_text,
                        const NonlinearityRegistry& registry = NonlinearityRegistry::global());
SystemFile load_system_file(const std::string& path,
                            const NonlinearityRegistry& registry = NonlinearityRegistry::global());

/// Discrete-time JSON form of `sys`, loadable by parse_system.
std::string system_to_json(const LipschitzSystem& sys,
                           const std::optional<TrackingSpec>& tracking = std::nullopt);

}  // namespace lipsyn::system
