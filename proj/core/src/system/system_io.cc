#include "lipsyn/system/system_io.h"

#include <fstream>
#include <sstream>

#include "../json_util.h"

namespace lipsyn::system {

using nlohmann::json;

Eigen::MatrixXd default_tracking_gain(int p) {
  return 1e-3 * Eigen::MatrixXd::Identity(p, p);
}

SystemFile parse_system(const std::string& json_text, const NonlinearityRegistry& registry) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("system file is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("system file must be a JSON object");

  const Eigen::MatrixXd A = detail::matrix_from_json(detail::require(doc, "A"), "A");
  const Eigen::MatrixXd B = detail::matrix_from_json(detail::require(doc, "B"), "B", true);
  const Eigen::MatrixXd C = detail::matrix_from_json(detail::require(doc, "C"), "C");
  const Eigen::MatrixXd G =
      doc.contains("G") ? detail::matrix_from_json(doc["G"], "G")
                        : Eigen::MatrixXd::Identity(A.rows(), A.rows()).eval();
  const double gamma_x = detail::number_from_json(detail::require(doc, "gamma_x"), "gamma_x");
  const double gamma_u = detail::number_from_json(detail::require(doc, "gamma_u"), "gamma_u");
  const json& fj = detail::require(doc, "f_name");
  if (!fj.is_string()) throw ParseError("'f_name' must be a string");
  const std::string f_name = fj.get<std::string>();

  NonlinearityParams params{static_cast<int>(A.rows()), static_cast<int>(B.cols()),
                            static_cast<int>(G.cols()), gamma_x, gamma_u};
  Nonlinearity f;
  try {
    f = registry.make(f_name, params);
  } catch (const std::out_of_range& e) {
    throw ParseError(e.what());
  }

  bool continuous = false;
  double T = 0.0;
  if (doc.contains("continuous")) {
    if (!doc["continuous"].is_boolean()) throw ParseError("'continuous' must be a boolean");
    continuous = doc["continuous"].get<bool>();
  }
  if (continuous) {
    T = detail::number_from_json(detail::require(doc, "T"), "T");
    if (!(T > 0.0)) throw ParseError("'T' must be positive");
  }

  std::optional<TrackingSpec> tracking;
  if (doc.contains("tracking") && !doc["tracking"].is_null()) {
    const json& tj = doc["tracking"];
    if (!tj.is_object()) throw ParseError("'tracking' must be an object");
    TrackingSpec ts;
    ts.r = detail::vector_from_json(detail::require(tj, "r"), "tracking.r");
    ts.E = tj.contains("E") ? detail::matrix_from_json(tj["E"], "tracking.E")
                            : default_tracking_gain(static_cast<int>(C.rows()));
    tracking = std::move(ts);
  }

  auto discrete = [&]() {
    if (continuous) {
      return euler_discretize(
          ContinuousSystem(A, B, G, C, std::move(f), gamma_x, gamma_u, f_name), T);
    }
    return LipschitzSystem(A, B, G, C, std::move(f), gamma_x, gamma_u, f_name);
  };
  SystemFile out{discrete(), std::move(tracking), continuous, T};
  // Validates E and r against the plant.
  if (out.tracking) augment_for_tracking(out.system, out.tracking->E, out.tracking->r);
  return out;
}

SystemFile load_system_file(const std::string& path, const NonlinearityRegistry& registry) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open system file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_system(ss.str(), registry);
}

std::string system_to_json(const LipschitzSystem& sys,
                           const std::optional<TrackingSpec>& tracking) {
  json doc;
  doc["A"] = detail::matrix_to_json(sys.A());
  doc["B"] = detail::matrix_to_json(sys.B());
  doc["G"] = detail::matrix_to_json(sys.G());
  doc["C"] = detail::matrix_to_json(sys.C());
  doc["gamma_x"] = detail::number(sys.gamma_x());
  doc["gamma_u"] = detail::number(sys.gamma_u());
  doc["f_name"] = sys.f_name();
  if (tracking) {
    doc["tracking"] = {{"E", detail::matrix_to_json(tracking->E)},
                       {"r", detail::vector_to_json(tracking->r)}};
  }
  return doc.dump(2) + "\n";
}

}  // namespace lipsyn::system
