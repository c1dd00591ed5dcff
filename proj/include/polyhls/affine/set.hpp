//===- set.hpp - Integer sets as conjunctions of affine constraints -*- C++ -*-===//
//
// Constraints are stored as dense integer rows over the column layout
//
//   [ dims | existentials | symbols | constant ]
//
// with `row . x >= 0` (inequality) or `row . x == 0` (equality). Rows are kept
// in canonical form: coefficients have gcd 1, inequality constants are
// tightened by floor, equalities start with a positive coefficient, duplicates
// and parallel pairs are merged. floordiv/ceildiv/mod terms are lowered to
// fresh existential columns when a constraint is added.
//
//===----------------------------------------------------------------------===//

#pragma once

#include "polyhls/affine/expr.hpp"

#include <span>
#include <vector>

namespace polyhls::affine {

enum class ConstraintKind { Equality, Inequality };

/// `expr == 0` or `expr >= 0`.
struct AffineConstraint {
  AffineExpr expr;
  ConstraintKind kind = ConstraintKind::Inequality;
};

struct Row {
  std::vector<Int> coeffs;
  bool equality = false;

  friend bool operator==(const Row &, const Row &) = default;
};

class IntegerSet {
public:
  IntegerSet() = default;
  IntegerSet(unsigned num_dims, unsigned num_symbols);

  static IntegerSet universe(unsigned num_dims, unsigned num_symbols) {
    return IntegerSet(num_dims, num_symbols);
  }
  static IntegerSet empty(unsigned num_dims, unsigned num_symbols);

  unsigned num_dims() const { return num_dims_; }
  unsigned num_exists() const { return num_exists_; }
  unsigned num_symbols() const { return num_symbols_; }
  /// Dims plus existentials: the columns that are variables.
  unsigned num_vars() const { return num_dims_ + num_exists_; }
  unsigned num_cols() const { return num_vars() + num_symbols_ + 1; }
  unsigned symbol_col(unsigned k) const { return num_vars() + k; }
  unsigned const_col() const { return num_cols() - 1; }

  /// The expression may reference d0..d<num_vars-1> (existentials follow the
  /// dims) and s0..s<num_symbols-1>. Div terms introduce new existentials.
  void add_constraint(const AffineConstraint &c);
  void add_inequality(const AffineExpr &e) {
    add_constraint({e, ConstraintKind::Inequality});
  }
  void add_equality(const AffineExpr &e) {
    add_constraint({e, ConstraintKind::Equality});
  }
  void add_row(Row row);
  void add_rows(std::span<const Row> rows);

  /// Appends `count` dims after the existing ones; returns the first index.
  unsigned append_dims(unsigned count);
  unsigned append_exists(unsigned count);
  /// Reinterprets the set in a space of `total_dims` dims, placing the
  /// current dims at `offset`. Symbols and existentials are kept.
  IntegerSet lift(unsigned total_dims, unsigned offset) const;
  /// Removes variable columns (dims or existentials); every coefficient in
  /// those columns must already be zero.
  void drop_zero_vars(std::vector<unsigned> cols);

  const std::vector<Row> &rows() const { return rows_; }
  bool is_obviously_empty() const;

  AffineExpr row_expr(const Row &row) const;
  std::vector<AffineConstraint> constraints() const;

  /// Exact membership test; existentials are searched.
  bool contains(std::span<const Int> dims, std::span<const Int> syms) const;

  /// Conjunction of two sets over the same dims and symbols.
  IntegerSet intersect(const IntegerSet &other) const;

  /// Substitutes the symbols with constants; the result has no symbols.
  IntegerSet fix_symbols(std::span<const Int> values) const;

  /// Re-canonicalizes after raw row edits.
  void simplify();

  /// Same space and the same constraint rows, in any order.
  friend bool operator==(const IntegerSet &a, const IntegerSet &b);

private:
  unsigned num_dims_ = 0;
  unsigned num_exists_ = 0;
  unsigned num_symbols_ = 0;
  std::vector<Row> rows_;
};

enum class RowStatus { Keep, Trivial, Infeasible };

/// Canonicalizes one row in place; the last coefficient is the constant.
RowStatus normalize_row(Row &row);

class AffineMap {
public:
  AffineMap() = default;
  AffineMap(unsigned num_dims, unsigned num_symbols, std::vector<AffineExpr> results);

  static AffineMap identity(unsigned n);

  unsigned num_dims() const { return num_dims_; }
  unsigned num_symbols() const { return num_symbols_; }
  unsigned num_results() const { return static_cast<unsigned>(results_.size()); }
  const std::vector<AffineExpr> &results() const { return results_; }
  const AffineExpr &result(unsigned k) const { return results_.at(k); }

  std::vector<Int> evaluate(std::span<const Int> dims, std::span<const Int> syms) const;

  friend bool operator==(const AffineMap &, const AffineMap &) = default;

private:
  unsigned num_dims_ = 0;
  unsigned num_symbols_ = 0;
  std::vector<AffineExpr> results_;
};

/// outer(inner(x)). Symbol spaces are merged by position.
AffineMap compose(const AffineMap &outer, const AffineMap &inner);

using IntMatrix = std::vector<std::vector<Int>>;

Int determinant(const IntMatrix &m);
/// Integer inverse of a unimodular matrix; NotUnimodular error otherwise.
IntMatrix unimodular_inverse(const IntMatrix &m);

/// The image {T x : x in set}, T acting on the set's dims.
IntegerSet apply_unimodular(const IntegerSet &set, const IntMatrix &t);
/// x -> T (map(x)): T acts on the result space.
AffineMap apply_unimodular(const AffineMap &map, const IntMatrix &t);

} // namespace polyhls::affine
