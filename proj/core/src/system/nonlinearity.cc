#include "lipsyn/system/nonlinearity.h"

#include <cmath>
#include <stdexcept>

#include "lipsyn/errors.h"

namespace lipsyn::system {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw DimensionError(what);
}

Nonlinearity make_zero(const NonlinearityParams& p) {
  const int g = p.g;
  return [g](const Eigen::VectorXd&, const Eigen::VectorXd&) {
    return Eigen::VectorXd::Zero(g).eval();
  };
}

Nonlinearity make_example1_cosine(const NonlinearityParams& p) {
  require(p.n >= 1 && p.m >= 1 && p.g >= 1,
          "example1_cosine needs n >= 1, m >= 1 and g >= 1");
  const int g = p.g;
  const double gx = p.gamma_x;
  const double ratio = gx > 0.0 ? p.gamma_u / gx : 0.0;
  return [g, gx, ratio](const Eigen::VectorXd& x, const Eigen::VectorXd& u) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(g);
    out(g - 1) = gx * std::cos(x(0) - ratio * u(0));
    return out;
  };
}

Nonlinearity make_example2_sine(const NonlinearityParams& p) {
  require(p.n >= 3 && p.g >= 1, "example2_sine needs n >= 3 and g >= 1");
  const int g = p.g;
  const double gx = p.gamma_x;
  return [g, gx](const Eigen::VectorXd& x, const Eigen::VectorXd&) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(g);
    out(g - 1) = -gx * std::sin(x(2));
    return out;
  };
}

}  // namespace

NonlinearityRegistry& NonlinearityRegistry::global() {
  static NonlinearityRegistry registry;
  return registry;
}

NonlinearityRegistry::NonlinearityRegistry() {
  factories_["zero"] = make_zero;
  factories_["example1_cosine"] = make_example1_cosine;
  factories_["example2_sine"] = make_example2_sine;
}

void NonlinearityRegistry::add(const std::string& name, NonlinearityFactory factory) {
  if (!factory) throw std::invalid_argument("empty nonlinearity factory for " + name);
  std::lock_guard<std::mutex> lock(mutex_);
  factories_[name] = std::move(factory);
}

bool NonlinearityRegistry::contains(const std::string& name) const {
  std::lock_guard<std::mutex> lock(mutex_);
  return factories_.count(name) != 0;
}

std::vector<std::string> NonlinearityRegistry::names() const {
  std::lock_guard<std::mutex> lock(mutex_);
  std::vector<std::string> out;
  for (const auto& [name, _] : factories_) out.push_back(name);
  return out;
}

Nonlinearity NonlinearityRegistry::make(const std::string& name,
                                        const NonlinearityParams& params) const {
  NonlinearityFactory factory;
  {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = factories_.find(name);
    if (it == factories_.end()) {
      std::string known;
      for (const auto& [k, _] : factories_) known += (known.empty() ? "" : ", ") + k;
      throw std::out_of_range("unknown nonlinearity '" + name + "' (known: " + known + ")");
    }
    factory = it->second;
  }
  return factory(params);
}

}  // namespace lipsyn::system
