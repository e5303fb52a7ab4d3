#include "lipsyn/lmi/matrix_expr.h"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace lipsyn::lmi {

namespace {

std::string shape_str(int r, int c) {
  std::ostringstream os;
  os << r << "x" << c;
  return os.str();
}

bool symmetric_within(const Eigen::MatrixXd& m, double rel_tol) {
  if (m.rows() != m.cols()) return false;
  if (m.size() == 0) return true;
  const double scale = m.cwiseAbs().maxCoeff();
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

}  // namespace

int Variable::num_coordinates() const {
  switch (kind) {
    case VariableKind::kScalar:
      return 1;
    case VariableKind::kSymmetric:
      return rows * (rows + 1) / 2;
    case VariableKind::kRectangular:
      return rows * cols;
  }
  return 0;
}

Eigen::MatrixXd Variable::basis(int index) const {
  switch (kind) {
    case VariableKind::kScalar:
      return Eigen::MatrixXd::Ones(1, 1);
    case VariableKind::kRectangular: {
      Eigen::MatrixXd e = Eigen::MatrixXd::Zero(rows, cols);
      e(index / cols, index % cols) = 1.0;
      return e;
    }
    case VariableKind::kSymmetric: {
      // Upper-triangle coordinates in row-major order.
      int k = index;
      int i = 0;
      while (k >= rows - i) {
        k -= rows - i;
        ++i;
      }
      const int j = i + k;
      Eigen::MatrixXd e = Eigen::MatrixXd::Zero(rows, rows);
      e(i, j) = 1.0;
      e(j, i) = 1.0;
      return e;
    }
  }
  return {};
}

void Assignment::set(const Variable& v, Eigen::MatrixXd value) {
  if (value.rows() != v.rows || value.cols() != v.cols) {
    throw std::invalid_argument("Assignment: value of shape " +
                                shape_str(value.rows(), value.cols()) +
                                " for variable of shape " +
                                shape_str(v.rows, v.cols));
  }
  values_[v.id] = std::move(value);
}

void Assignment::set(const Variable& v, double value) {
  set(v, Eigen::MatrixXd::Constant(1, 1, value));
}

const Eigen::MatrixXd& Assignment::at(int id) const {
  auto it = values_.find(id);
  if (it == values_.end()) {
    throw std::out_of_range("Assignment: no value for variable " +
                            std::to_string(id));
  }
  return it->second;
}

double Assignment::scalar(const Variable& v) const { return at(v)(0, 0); }

MatrixExpr::MatrixExpr(const Variable& v)
    : rows_(v.rows),
      cols_(v.cols),
      constant_(Eigen::MatrixXd::Zero(v.rows, v.cols)) {
  terms_.push_back(Term{v, {}, {}, false});
}

MatrixExpr MatrixExpr::constant(Eigen::MatrixXd value) {
  MatrixExpr e;
  e.rows_ = static_cast<int>(value.rows());
  e.cols_ = static_cast<int>(value.cols());
  e.constant_ = std::move(value);
  return e;
}

MatrixExpr MatrixExpr::zero(int rows, int cols) {
  return constant(Eigen::MatrixXd::Zero(rows, cols));
}

MatrixExpr MatrixExpr::identity(int n) {
  return constant(Eigen::MatrixXd::Identity(n, n));
}

MatrixExpr MatrixExpr::scalar(double value) {
  return constant(Eigen::MatrixXd::Constant(1, 1, value));
}

int MatrixExpr::scalar_width(const Term& t) {
  if (t.left.size() != 0) return static_cast<int>(t.left.cols());
  if (t.right.size() != 0) return static_cast<int>(t.right.rows());
  return 1;
}

void MatrixExpr::add_term(Term t) { terms_.push_back(std::move(t)); }

MatrixExpr MatrixExpr::transpose() const {
  MatrixExpr out;
  out.rows_ = cols_;
  out.cols_ = rows_;
  out.constant_ = constant_.transpose();
  out.terms_.reserve(terms_.size());
  for (const Term& t : terms_) {
    Term tt;
    tt.variable = t.variable;
    tt.left = t.right.transpose();
    tt.right = t.left.transpose();
    tt.transposed = t.variable.kind == VariableKind::kRectangular
                        ? !t.transposed
                        : t.transposed;
    out.terms_.push_back(std::move(tt));
  }
  return out;
}

MatrixExpr MatrixExpr::times(const Eigen::MatrixXd& m) const {
  if (rows_ != 1 || cols_ != 1) {
    throw std::invalid_argument("MatrixExpr::times needs a 1x1 expression, got " +
                                shape_str(rows_, cols_));
  }
  MatrixExpr out = constant(constant_(0, 0) * m);
  for (const Term& t : terms_) {
    if (t.variable.kind != VariableKind::kScalar) {
      throw std::invalid_argument(
          "MatrixExpr::times: only scalar variables can be broadcast");
    }
    const double l = t.left.size() ? t.left(0, 0) : 1.0;
    const double r = t.right.size() ? t.right(0, 0) : 1.0;
    out.add_term(Term{t.variable, l * r * m, {}, false});
  }
  return out;
}

Eigen::MatrixXd MatrixExpr::evaluate(const Assignment& values) const {
  Eigen::MatrixXd out = constant_;
  for (const Term& t : terms_) {
    const Eigen::MatrixXd& raw = values.at(t.variable);
    Eigen::MatrixXd v;
    if (t.variable.kind == VariableKind::kScalar) {
      v = raw(0, 0) * Eigen::MatrixXd::Identity(scalar_width(t), scalar_width(t));
    } else {
      v = t.transposed ? Eigen::MatrixXd(raw.transpose()) : raw;
    }
    if (t.left.size()) v = t.left * v;
    if (t.right.size()) v = v * t.right;
    out += v;
  }
  return out;
}

std::vector<Eigen::MatrixXd> MatrixExpr::coefficients(const Variable& var) const {
  std::vector<Eigen::MatrixXd> out;
  bool found = false;
  for (const Term& t : terms_) {
    if (t.variable.id != var.id) continue;
    if (!found) {
      out.assign(var.num_coordinates(), Eigen::MatrixXd::Zero(rows_, cols_));
      found = true;
    }
    const int k = scalar_width(t);
    for (int c = 0; c < var.num_coordinates(); ++c) {
      Eigen::MatrixXd e;
      if (var.kind == VariableKind::kScalar) {
        e = Eigen::MatrixXd::Identity(k, k);
      } else {
        e = var.basis(c);
        if (t.transposed) e.transposeInPlace();
      }
      if (t.left.size()) e = t.left * e;
      if (t.right.size()) e = e * t.right;
      out[c] += e;
    }
  }
  return out;
}

std::vector<Variable> MatrixExpr::variables() const {
  std::vector<Variable> out;
  for (const Term& t : terms_) {
    const bool seen = std::any_of(out.begin(), out.end(), [&](const Variable& v) {
      return v.id == t.variable.id;
    });
    if (!seen) out.push_back(t.variable);
  }
  return out;
}

bool MatrixExpr::is_symmetric(double rel_tol) const {
  if (rows_ != cols_) return false;
  if (!symmetric_within(constant_, rel_tol)) return false;
  for (const Variable& v : variables()) {
    for (const Eigen::MatrixXd& c : coefficients(v)) {
      if (!symmetric_within(c, rel_tol)) return false;
    }
  }
  return true;
}

MatrixExpr& MatrixExpr::operator+=(const MatrixExpr& other) {
  if (rows_ == 0 && cols_ == 0 && terms_.empty()) {
    *this = other;
    return *this;
  }
  if (other.rows_ != rows_ || other.cols_ != cols_) {
    throw std::invalid_argument("MatrixExpr: cannot add " +
                                shape_str(other.rows_, other.cols_) + " to " +
                                shape_str(rows_, cols_));
  }
  constant_ += other.constant_;
  terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
  return *this;
}

MatrixExpr& MatrixExpr::operator-=(const MatrixExpr& other) {
  return *this += -other;
}

MatrixExpr& MatrixExpr::operator*=(double s) {
  constant_ *= s;
  for (Term& t : terms_) {
    if (t.left.size()) {
      t.left *= s;
    } else if (t.right.size()) {
      t.right *= s;
    } else {
      const int k = t.variable.kind == VariableKind::kScalar
                        ? 1
                        : (t.transposed ? t.variable.cols : t.variable.rows);
      t.left = s * Eigen::MatrixXd::Identity(k, k);
    }
  }
  return *this;
}

MatrixExpr operator*(const Eigen::MatrixXd& m, const MatrixExpr& a) {
  if (m.cols() != a.rows()) {
    throw std::invalid_argument("MatrixExpr: cannot left-multiply " +
                                shape_str(a.rows(), a.cols()) + " by " +
                                shape_str(m.rows(), m.cols()));
  }
  MatrixExpr out = MatrixExpr::constant(m * a.constant_part());
  for (MatrixExpr::Term t : a.terms()) {
    t.left = t.left.size() ? Eigen::MatrixXd(m * t.left) : m;
    out.add_term(std::move(t));
  }
  return out;
}

MatrixExpr operator*(const MatrixExpr& a, const Eigen::MatrixXd& m) {
  if (a.cols() != m.rows()) {
    throw std::invalid_argument("MatrixExpr: cannot right-multiply " +
                                shape_str(a.rows(), a.cols()) + " by " +
                                shape_str(m.rows(), m.cols()));
  }
  MatrixExpr out = MatrixExpr::constant(a.constant_part() * m);
  for (MatrixExpr::Term t : a.terms()) {
    t.right = t.right.size() ? Eigen::MatrixXd(t.right * m) : m;
    out.add_term(std::move(t));
  }
  return out;
}

MatrixExpr assemble_block(const BlockGrid& grid) {
  const int nr = static_cast<int>(grid.size());
  if (nr == 0) return {};
  const int nc = static_cast<int>(grid.front().size());
  for (const auto& row : grid) {
    if (static_cast<int>(row.size()) != nc) {
      throw std::invalid_argument("assemble_block: ragged block grid");
    }
  }

  bool has_mirror = false;
  auto resolve = [&](int i, int j) -> MatrixExpr {
    if (grid[i][j]) return *grid[i][j];
    has_mirror = true;
    if (i == j || j >= nr || i >= nc || !grid[j][i]) {
      throw std::invalid_argument("assemble_block: cell (" + std::to_string(i) +
                                  "," + std::to_string(j) +
                                  ") is '*' but its mirror is not given");
    }
    return grid[j][i]->transpose();
  };

  std::vector<std::vector<MatrixExpr>> cells(nr, std::vector<MatrixExpr>(nc));
  for (int i = 0; i < nr; ++i)
    for (int j = 0; j < nc; ++j) cells[i][j] = resolve(i, j);

  std::vector<int> heights(nr), widths(nc);
  for (int i = 0; i < nr; ++i) {
    heights[i] = cells[i][0].rows();
    for (int j = 0; j < nc; ++j) {
      if (cells[i][j].rows() != heights[i]) {
        throw std::invalid_argument(
            "assemble_block: block row " + std::to_string(i) + " mixes heights " +
            std::to_string(heights[i]) + " and " +
            std::to_string(cells[i][j].rows()) + " (cell " + std::to_string(i) +
            "," + std::to_string(j) + " is " +
            shape_str(cells[i][j].rows(), cells[i][j].cols()) + ")");
      }
    }
  }
  for (int j = 0; j < nc; ++j) {
    widths[j] = cells[0][j].cols();
    for (int i = 0; i < nr; ++i) {
      if (cells[i][j].cols() != widths[j]) {
        throw std::invalid_argument(
            "assemble_block: block column " + std::to_string(j) +
            " mixes widths " + std::to_string(widths[j]) + " and " +
            std::to_string(cells[i][j].cols()));
      }
    }
  }

  if (has_mirror) {
    if (nr != nc) {
      throw std::invalid_argument("assemble_block: '*' cells need a square grid");
    }
    for (int i = 0; i < nr; ++i) {
      if (heights[i] != widths[i] || !cells[i][i].is_symmetric()) {
        throw std::invalid_argument("assemble_block: diagonal block " +
                                    std::to_string(i) +
                                    " is not square and symmetric");
      }
    }
  }

  int total_rows = 0, total_cols = 0;
  std::vector<int> row_off(nr), col_off(nc);
  for (int i = 0; i < nr; ++i) {
    row_off[i] = total_rows;
    total_rows += heights[i];
  }
  for (int j = 0; j < nc; ++j) {
    col_off[j] = total_cols;
    total_cols += widths[j];
  }

  MatrixExpr out = MatrixExpr::zero(total_rows, total_cols);
  for (int i = 0; i < nr; ++i) {
    for (int j = 0; j < nc; ++j) {
      const MatrixExpr& c = cells[i][j];
      Eigen::MatrixXd lift_rows = Eigen::MatrixXd::Zero(total_rows, heights[i]);
      lift_rows.middleRows(row_off[i], heights[i]).setIdentity();
      Eigen::MatrixXd lift_cols = Eigen::MatrixXd::Zero(widths[j], total_cols);
      lift_cols.middleCols(col_off[j], widths[j]).setIdentity();
      out += lift_rows * c * lift_cols;
    }
  }
  return out;
}

}  // namespace lipsyn::lmi
