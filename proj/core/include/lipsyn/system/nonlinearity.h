#pragma once

#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "lipsyn/system/lipschitz_system.h"

namespace lipsyn::system {

struct NonlinearityParams {
  int n = 0;  // state dimension
  int m = 0;  // input dimension
  int g = 0;  // output dimension of f
  double gamma_x = 0.0;
  double gamma_u = 0.0;
};

using NonlinearityFactory = std::function<Nonlinearity(const NonlinearityParams&)>;

/// Named nonlinearities referenced from system files.
///
/// Built-ins (all put their value in the last of the g outputs, zeros elsewhere):
///   zero             f = 0
///   example1_cosine  gamma_x * cos(x1 - (gamma_u / gamma_x) u1)
///   example2_sine    -gamma_x * sin(x3)
class NonlinearityRegistry {
 public:
  /// Process-wide registry, preloaded with the built-ins.
  static NonlinearityRegistry& global();

  NonlinearityRegistry();

  void add(const std::string& name, NonlinearityFactory factory);
  bool contains(const std::string& name) const;
  std::vector<std::string> names() const;

  /// Throws std::out_of_range for unknown names and DimensionError when the
  /// built-in cannot be evaluated at the requested dimensions.
  Nonlinearity make(const std::string& name, const NonlinearityParams& params) const;

 private:
  mutable std::mutex mutex_;
  std::map<std::string, NonlinearityFactory> factories_;
};

}  // namespace lipsyn::system
