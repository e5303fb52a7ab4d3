#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

namespace lipsyn::lmi {

enum class VariableKind { kScalar, kSymmetric, kRectangular };

/// Handle to a decision variable owned by an LmiProblem. A scalar variable
/// has shape 1x1; inside a product it acts as `v * I` of conforming size.
struct Variable {
  int id = -1;
  VariableKind kind = VariableKind::kScalar;
  int rows = 1;
  int cols = 1;

  /// Number of free scalar coordinates (n(n+1)/2 for symmetric matrices).
  int num_coordinates() const;
  /// Coordinate `index` as a basis matrix E, so that V = sum_c y_c E_c.
  Eigen::MatrixXd basis(int index) const;
};

/// Values for a set of variables, keyed by variable id.
class Assignment {
 public:
  void set(const Variable& v, Eigen::MatrixXd value);
  void set(const Variable& v, double value);
  bool contains(int id) const { return values_.count(id) != 0; }
  const Eigen::MatrixXd& at(int id) const;
  const Eigen::MatrixXd& at(const Variable& v) const { return at(v.id); }
  double scalar(const Variable& v) const;

 private:
  std::unordered_map<int, Eigen::MatrixXd> values_;
};

/// Affine matrix-valued expression
///
///   constant + sum_k L_k * op(V_k) * R_k,   op(V) in {V, V^T}
///
/// over decision variables. Empty L or R stands for the identity. A scalar
/// variable V = v contributes L * (v I) * R, so `alpha * M` is the term
/// {alpha, L = M, R = I}.
class MatrixExpr {
 public:
  struct Term {
    Variable variable;
    Eigen::MatrixXd left;   // empty means identity
    Eigen::MatrixXd right;  // empty means identity
    bool transposed = false;
  };

  MatrixExpr() = default;
  MatrixExpr(const Variable& v);  // NOLINT: implicit by design of the DSL

  static MatrixExpr constant(Eigen::MatrixXd value);
  static MatrixExpr zero(int rows, int cols);
  static MatrixExpr identity(int n);
  static MatrixExpr scalar(double value);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool is_constant() const { return terms_.empty(); }
  const Eigen::MatrixXd& constant_part() const { return constant_; }
  const std::vector<Term>& terms() const { return terms_; }

  MatrixExpr transpose() const;

  /// For a 1x1 expression s, returns the expression s * M.
  MatrixExpr times(const Eigen::MatrixXd& m) const;

  Eigen::MatrixXd evaluate(const Assignment& values) const;

  /// d(expr)/d(y_c) for every coordinate c of `v`. Empty result if `v`
  /// does not appear.
  std::vector<Eigen::MatrixXd> coefficients(const Variable& v) const;
  /// Distinct variables appearing in the expression, in first-use order.
  std::vector<Variable> variables() const;

  /// Structural symmetry: constant and every coordinate coefficient are
  /// symmetric within `rel_tol` of their own max-abs entry.
  bool is_symmetric(double rel_tol = 1e-10) const;

  MatrixExpr& operator+=(const MatrixExpr& other);
  MatrixExpr& operator-=(const MatrixExpr& other);
  MatrixExpr& operator*=(double s);

  friend MatrixExpr operator+(MatrixExpr a, const MatrixExpr& b) { return a += b; }
  friend MatrixExpr operator-(MatrixExpr a, const MatrixExpr& b) { return a -= b; }
  friend MatrixExpr operator-(MatrixExpr a) { return a *= -1.0; }
  friend MatrixExpr operator*(double s, MatrixExpr a) { return a *= s; }
  friend MatrixExpr operator*(MatrixExpr a, double s) { return a *= s; }
  friend MatrixExpr operator*(const Eigen::MatrixXd& m, const MatrixExpr& a);
  friend MatrixExpr operator*(const MatrixExpr& a, const Eigen::MatrixXd& m);

 private:
  // Size of the v*I block a scalar-variable term expands to.
  static int scalar_width(const Term& t);
  void add_term(Term t);

  int rows_ = 0;
  int cols_ = 0;
  Eigen::MatrixXd constant_;
  std::vector<Term> terms_;
};

/// One cell of a block grid. `std::nullopt` marks a "*" cell, filled with
/// the transpose of the mirrored cell across the diagonal.
using BlockCell = std::optional<MatrixExpr>;
using BlockGrid = std::vector<std::vector<BlockCell>>;

/// Concatenates a grid of blocks. Throws std::invalid_argument on
/// inconsistent row heights / column widths or on a "*" whose mirror is
/// itself a "*".
MatrixExpr assemble_block(const BlockGrid& grid);

}  // namespace lipsyn::lmi
