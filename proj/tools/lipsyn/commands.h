#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace lipsyn::cli {

/// Exit codes shared by every command.
enum ExitCode : int {
  kOk = 0,
  kInputError = 1,   // I/O, parse or dimension problems
  kInfeasible = 2,   // no certified gain
  kDiverged = 3,     // rollout left the divergence guard
};

struct SynthesizeOptions {
  std::string system_path;
  std::string config_path;  // empty: default configuration
  std::string out_path;
};

struct SimulateOptions {
  std::string system_path;
  std::string gain_path;
  std::vector<double> x0;
  int steps = 0;
  std::string out_path;
  /// Require the system file to carry a tracking block.
  bool tracking = false;
};

struct DemoOptions {
  std::vector<std::string> examples;
  bool tracking = false;
  std::string out_dir = "demo_out";
  std::optional<int> steps;
  int jobs = 1;
};

int cmd_synthesize(const SynthesizeOptions& options, std::ostream& out, std::ostream& err);
int cmd_simulate(const SimulateOptions& options, std::ostream& out, std::ostream& err);
int cmd_demo(const DemoOptions& options, std::ostream& out, std::ostream& err);

/// Comma-separated list of numbers. Throws std::invalid_argument.
std::vector<double> parse_vector(const std::string& text);

/// "<dir>/<stem>.manifest.json" next to `output`.
std::string manifest_path_for(const std::string& output);

}  // namespace lipsyn::cli
