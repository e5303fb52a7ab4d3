#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace lipsyn::cli {

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view data, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t v);

struct HistorySummary {
  int iterations = 0;
  double t_first = 0.0;
  double t_last = 0.0;
  bool converged = false;
  bool warning = false;
};

/// Record of one command invocation, written next to its outputs.
struct RunManifest {
  std::string command;
  std::vector<std::string> inputs;
  std::string config_hash;
  std::vector<std::string> outputs;
  double duration_s = 0.0;
  bool has_history = false;
  HistorySummary history;
  int exit_code = 0;

  std::string to_json() const;
  /// Adds `path` itself to `outputs` before writing.
  void write(const std::string& path);
};

}  // namespace lipsyn::cli
