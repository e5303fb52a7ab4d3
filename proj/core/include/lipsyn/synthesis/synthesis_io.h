#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lipsyn/synthesis/sca.h"
#include "lipsyn/synthesis/types.h"

namespace lipsyn::synthesis {

/// JSON object with any of: alpha_init, rho, kappa0, eps_small, tol,
/// max_iter, kappa_retry_schedule, delta, sigma. Missing fields keep their
/// defaults; a missing schedule is derived from kappa0. Unknown fields are
/// rejected. Throws ParseError, or std::invalid_argument from validate().
SynthesisConfig parse_config(const std::string& json_text);
SynthesisConfig load_config_file(const std::string& path);
std::string config_to_json(const SynthesisConfig& config);

struct GainHistoryEntry {
  int k = 0;
  double t = 0.0;
  double alpha = 0.0;
};

/// Contents of a gain file.
struct GainFile {
  Eigen::MatrixXd K;
  Eigen::MatrixXd Q;
  double alpha = 0.0;
  double epsilon = 0.0;
  double kappa = 0.0;
  double t = 0.0;
  double certificate_max_eig = 0.0;
  double certificate_norm_gap = 0.0;
  bool certificate_valid = false;
  bool converged = false;
  bool warning = false;
  std::string warning_message;
  std::vector<GainHistoryEntry> history;
};

GainFile gain_from_result(const ScaResult& result);

/// Numbers are written with 12 significant digits, so identical inputs give
/// byte-identical files.
std::string gain_to_json(const GainFile& gain);

/// Only `K` is required; the remaining fields are read when present.
GainFile parse_gain(const std::string& json_text);
GainFile load_gain_file(const std::string& path);

}  // namespace lipsyn::synthesis
