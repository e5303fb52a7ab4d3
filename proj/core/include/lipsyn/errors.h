#pragma once

#include <stdexcept>
#include <string>

namespace lipsyn {

/// Inconsistent matrix or vector shapes.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed or incomplete input file.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Step 1 / Step 2 found no starting point for any retry combination.
class InfeasibleInitialization : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A rollout left the finite range or exceeded the divergence guard.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, int step)
      : std::runtime_error(what), step_(step) {}
  int step() const { return step_; }

 private:
  int step_;
};

/// A trajectory tail did not settle.
class NotConvergedError : public std::runtime_error {
 public:
  NotConvergedError(const std::string& what, double tail_variance)
      : std::runtime_error(what), tail_variance_(tail_variance) {}
  double tail_variance() const { return tail_variance_; }

 private:
  double tail_variance_;
};

}  // namespace lipsyn
