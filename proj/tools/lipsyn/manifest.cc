#include "manifest.h"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "lipsyn/numeric_format.h"

namespace lipsyn::cli {

std::uint64_t fnv1a(std::string_view data, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string RunManifest::to_json() const {
  nlohmann::json doc;
  doc["command"] = command;
  doc["inputs"] = inputs;
  doc["config_hash"] = config_hash;
  doc["outputs"] = outputs;
  doc["duration_s"] = round_significant(duration_s, 6);
  doc["exit_code"] = exit_code;
  if (has_history) {
    doc["history"] = {{"iterations", history.iterations},
                      {"t_first", round_significant(history.t_first)},
                      {"t_last", round_significant(history.t_last)},
                      {"converged", history.converged},
                      {"warning", history.warning}};
  }
  return doc.dump(2) + "\n";
}

void RunManifest::write(const std::string& path) {
  outputs.push_back(path);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << to_json();
}

}  // namespace lipsyn::cli
