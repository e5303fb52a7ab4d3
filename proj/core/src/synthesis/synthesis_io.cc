#include "lipsyn/synthesis/synthesis_io.h"

#include <fstream>
#include <set>
#include <sstream>

#include "../json_util.h"

namespace lipsyn::synthesis {

using nlohmann::json;

namespace {

json parse_object(const std::string& text, const std::string& what) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(what + " is not valid JSON: " + e.what());
  }
  if (!doc.is_object()) throw ParseError(what + " must be a JSON object");
  return doc;
}

std::string read_file(const std::string& path, const std::string& what) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + what + " '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

SynthesisConfig parse_config(const std::string& json_text) {
  const json doc = parse_object(json_text, "config file");
  static const std::set<std::string> known = {"alpha_init", "rho",   "kappa0",
                                              "eps_small",  "tol",   "max_iter",
                                              "kappa_retry_schedule", "delta", "sigma"};
  for (const auto& [key, value] : doc.items()) {
    if (!known.count(key)) throw ParseError("unknown config field '" + key + "'");
  }
  SynthesisConfig cfg;
  auto read = [&](const char* key, double& dst) {
    if (doc.contains(key)) dst = detail::number_from_json(doc[key], key);
  };
  read("alpha_init", cfg.alpha_init);
  read("rho", cfg.rho);
  read("kappa0", cfg.kappa0);
  read("eps_small", cfg.eps_small);
  read("tol", cfg.tol);
  read("delta", cfg.delta);
  read("sigma", cfg.sigma);
  if (doc.contains("max_iter")) {
    if (!doc["max_iter"].is_number_integer()) throw ParseError("'max_iter' must be an integer");
    cfg.max_iter = doc["max_iter"].get<int>();
  }
  if (doc.contains("kappa_retry_schedule")) {
    const json& s = doc["kappa_retry_schedule"];
    if (!s.is_array()) throw ParseError("'kappa_retry_schedule' must be an array");
    cfg.kappa_retry_schedule.clear();
    for (const auto& v : s) {
      cfg.kappa_retry_schedule.push_back(detail::number_from_json(v, "kappa_retry_schedule"));
    }
  } else {
    cfg.kappa_retry_schedule = default_kappa_schedule(cfg.kappa0);
  }
  cfg.validate();
  return cfg;
}

SynthesisConfig load_config_file(const std::string& path) {
  return parse_config(read_file(path, "config file"));
}

std::string config_to_json(const SynthesisConfig& cfg) {
  json doc;
  doc["alpha_init"] = detail::number(cfg.alpha_init);
  doc["rho"] = detail::number(cfg.rho);
  doc["kappa0"] = detail::number(cfg.kappa0);
  doc["eps_small"] = detail::number(cfg.eps_small);
  doc["tol"] = detail::number(cfg.tol);
  doc["max_iter"] = cfg.max_iter;
  json sched = json::array();
  for (double k : cfg.kappa_retry_schedule) sched.push_back(detail::number(k));
  doc["kappa_retry_schedule"] = std::move(sched);
  doc["delta"] = detail::number(cfg.delta);
  doc["sigma"] = detail::number(cfg.sigma);
  return doc.dump(2) + "\n";
}

GainFile gain_from_result(const ScaResult& r) {
  GainFile g;
  const ScaIterate& it = r.final_iterate;
  g.K = r.K;
  g.Q = it.Q;
  g.alpha = it.alpha;
  g.epsilon = it.epsilon;
  g.kappa = it.kappa;
  g.t = it.t;
  g.certificate_max_eig = r.certificate.max_eig();
  g.certificate_norm_gap = r.certificate.norm_gap;
  g.certificate_valid = r.certificate.valid();
  g.converged = r.converged;
  g.warning = r.warning;
  g.warning_message = r.warning_message;
  for (const auto& h : r.history) g.history.push_back({h.k, h.iterate.t, h.iterate.alpha});
  return g;
}

std::string gain_to_json(const GainFile& g) {
  json doc;
  doc["K"] = detail::matrix_to_json(g.K);
  if (g.Q.size() > 0) doc["Q"] = detail::matrix_to_json(g.Q);
  doc["alpha"] = detail::number(g.alpha);
  doc["epsilon"] = detail::number(g.epsilon);
  doc["kappa"] = detail::number(g.kappa);
  doc["t"] = detail::number(g.t);
  doc["certificate"] = {{"max_eig", detail::number(g.certificate_max_eig)},
                        {"norm_gap", detail::number(g.certificate_norm_gap)},
                        {"valid", g.certificate_valid}};
  json hist = json::array();
  for (const auto& h : g.history) {
    hist.push_back({{"k", h.k}, {"t", detail::number(h.t)}, {"alpha", detail::number(h.alpha)}});
  }
  doc["history"] = std::move(hist);
  doc["converged"] = g.converged;
  doc["warning"] = g.warning;
  if (g.warning) doc["warning_message"] = g.warning_message;
  return doc.dump(2) + "\n";
}

GainFile parse_gain(const std::string& json_text) {
  const json doc = parse_object(json_text, "gain file");
  GainFile g;
  g.K = detail::matrix_from_json(detail::require(doc, "K"), "K");
  if (doc.contains("Q")) g.Q = detail::matrix_from_json(doc["Q"], "Q");
  auto read = [&](const char* key, double& dst) {
    if (doc.contains(key)) dst = detail::number_from_json(doc[key], key);
  };
  read("alpha", g.alpha);
  read("epsilon", g.epsilon);
  read("kappa", g.kappa);
  read("t", g.t);
  if (doc.contains("certificate")) {
    const json& c = doc["certificate"];
    if (!c.is_object()) throw ParseError("'certificate' must be an object");
    if (c.contains("max_eig")) g.certificate_max_eig = detail::number_from_json(c["max_eig"], "max_eig");
    if (c.contains("norm_gap")) {
      g.certificate_norm_gap = detail::number_from_json(c["norm_gap"], "norm_gap");
    }
    if (c.contains("valid") && c["valid"].is_boolean()) g.certificate_valid = c["valid"].get<bool>();
  }
  if (doc.contains("history")) {
    if (!doc["history"].is_array()) throw ParseError("'history' must be an array");
    for (const auto& h : doc["history"]) {
      g.history.push_back({h.value("k", 0), detail::number_from_json(detail::require(h, "t"), "t"),
                           detail::number_from_json(detail::require(h, "alpha"), "alpha")});
    }
  }
  if (doc.contains("converged") && doc["converged"].is_boolean()) g.converged = doc["converged"].get<bool>();
  if (doc.contains("warning") && doc["warning"].is_boolean()) g.warning = doc["warning"].get<bool>();
  if (doc.contains("warning_message") && doc["warning_message"].is_string()) {
    g.warning_message = doc["warning_message"].get<std::string>();
  }
  return g;
}

GainFile load_gain_file(const std::string& path) {
  return parse_gain(read_file(path, "gain file"));
}

}  // namespace lipsyn::synthesis
