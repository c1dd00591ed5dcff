//===- ast.hpp - AST of the poly-C input language ---------------*- C++ -*-===//
//
// The language is a small C subset:
//
//   int N, M;                      // size symbols
//   float A[N][N]; int B[N];       // arrays (float = 64-bit, int = 64-bit)
//   #pragma scop
//   for (i = 1; i < N; i++) {      // also <=, ++i, i += 1
//     if (i >= 2 && i < N - 1)
//       S1: A[i][i] = A[i-1][i] * 2 + B[i];
//   }
//   #pragma endscop
//
// Equality on AST nodes ignores source locations.
//
//===----------------------------------------------------------------------===//

#pragma once

#include "polyhls/support/checked.hpp"
#include "polyhls/support/error.hpp"
#include "polyhls/support/lexer.hpp"

#include <string>
#include <variant>
#include <vector>

namespace polyhls::frontend {

enum class ElemKind { Int64, Float64 };

const char *to_string(ElemKind kind);

enum class ExprKind { IntLit, FloatLit, Var, ArrayRef, Neg, Add, Sub, Mul };

struct Expr {
  ExprKind kind = ExprKind::IntLit;
  Int int_value = 0;
  double float_value = 0.0;
  /// Variable or array name.
  std::string name;
  /// Operands of Neg/Add/Sub/Mul, or the subscripts of an ArrayRef.
  std::vector<Expr> operands;
  SourceLoc loc;

  static Expr integer(Int v, SourceLoc loc = {});
  static Expr floating(double v, SourceLoc loc = {});
  static Expr var(std::string name, SourceLoc loc = {});
  static Expr array(std::string name, std::vector<Expr> subscripts, SourceLoc loc = {});
  static Expr unary(ExprKind kind, Expr operand, SourceLoc loc = {});
  static Expr binary(ExprKind kind, Expr lhs, Expr rhs, SourceLoc loc = {});

  friend bool operator==(const Expr &a, const Expr &b);
};

enum class CmpOp { Lt, Le, Gt, Ge, Eq };

const char *to_string(CmpOp op);

struct Condition {
  Expr lhs;
  CmpOp op = CmpOp::Lt;
  Expr rhs;

  friend bool operator==(const Condition &, const Condition &) = default;
};

struct Stmt;

struct ForStmt {
  std::string var;
  Expr lower;
  Expr upper;
  /// `i <= upper` when true, `i < upper` otherwise.
  bool inclusive = false;
  std::vector<Stmt> body;
};

struct IfStmt {
  /// Conjunction.
  std::vector<Condition> conds;
  std::vector<Stmt> then_body;
  std::vector<Stmt> else_body;
};

struct AssignStmt {
  std::string label;
  Expr target;
  Expr value;
};

struct ScopMarker {
  bool begin = true;
};

struct Stmt {
  std::variant<ForStmt, IfStmt, AssignStmt, ScopMarker> node;
  SourceLoc loc;

  friend bool operator==(const Stmt &a, const Stmt &b);
};

bool operator==(const ForStmt &a, const ForStmt &b);
bool operator==(const IfStmt &a, const IfStmt &b);
bool operator==(const AssignStmt &a, const AssignStmt &b);
bool operator==(const ScopMarker &a, const ScopMarker &b);

struct ArrayDecl {
  std::string name;
  ElemKind elem = ElemKind::Float64;
  /// Affine in symbols and constants.
  std::vector<Expr> extents;
  SourceLoc loc;

  friend bool operator==(const ArrayDecl &a, const ArrayDecl &b) {
    return a.name == b.name && a.elem == b.elem && a.extents == b.extents;
  }
};

struct Program {
  std::vector<std::string> symbols;
  std::vector<ArrayDecl> arrays;
  std::vector<Stmt> body;

  const ArrayDecl *find_array(std::string_view name) const;
  bool is_symbol(std::string_view name) const;

  friend bool operator==(const Program &, const Program &) = default;
};

Program parse_program(std::string_view source);

/// One `[label:] target = value;` statement, with names resolved against the
/// symbols and arrays of `decls` and the given loop iterators.
AssignStmt parse_assignment(TokenStream &ts, const Program &decls,
                            const std::vector<std::string> &iterators);

/// Subscript-style rendering is compact ("i-1"); other expressions are
/// spaced ("A[i-1][j] + A[i][j-1]").
std::string print_expr(const Expr &e, bool compact = false);
std::string print_program(const Program &p);

} // namespace polyhls::frontend
