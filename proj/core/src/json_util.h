#pragma once

// Internal helpers shared by the JSON readers and writers.

#include <string>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "lipsyn/errors.h"
#include "lipsyn/numeric_format.h"

namespace lipsyn::detail {

inline nlohmann::json number(double v) { return round_significant(v, 12); }

inline nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(number(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
  nlohmann::json out = nlohmann::json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(number(v(i)));
  return out;
}

inline double number_from_json(const nlohmann::json& j, const std::string& what) {
  if (!j.is_number()) throw ParseError("'" + what + "' must be a number");
  return j.get<double>();
}

/// Row-major nested array. A flat array is one row, or one column when
/// `flat_is_column`; a bare number is 1x1.
inline Eigen::MatrixXd matrix_from_json(const nlohmann::json& j, const std::string& what,
                                        bool flat_is_column = false) {
  if (j.is_number()) return Eigen::MatrixXd::Constant(1, 1, j.get<double>());
  if (!j.is_array() || j.empty()) {
    throw ParseError("'" + what + "' must be a non-empty array");
  }
  if (!j.front().is_array()) {
    Eigen::MatrixXd row(1, static_cast<int>(j.size()));
    for (size_t c = 0; c < j.size(); ++c) {
      row(0, static_cast<int>(c)) = number_from_json(j[c], what);
    }
    if (flat_is_column) return row.transpose();
    return row;
  }
  const int rows = static_cast<int>(j.size());
  const int cols = static_cast<int>(j.front().size());
  Eigen::MatrixXd m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    const auto& row = j[r];
    if (!row.is_array() || static_cast<int>(row.size()) != cols) {
      throw ParseError("'" + what + "' row " + std::to_string(r) + " has the wrong length");
    }
    for (int c = 0; c < cols; ++c) m(r, c) = number_from_json(row[c], what);
  }
  return m;
}

inline Eigen::VectorXd vector_from_json(const nlohmann::json& j, const std::string& what) {
  if (j.is_number()) return Eigen::VectorXd::Constant(1, j.get<double>());
  if (!j.is_array()) throw ParseError("'" + what + "' must be a number or an array");
  Eigen::VectorXd v(static_cast<int>(j.size()));
  for (size_t i = 0; i < j.size(); ++i) v(static_cast<int>(i)) = number_from_json(j[i], what);
  return v;
}

inline const nlohmann::json& require(const nlohmann::json& obj, const std::string& key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError("missing field '" + key + "'");
  return *it;
}

}  // namespace lipsyn::detail
