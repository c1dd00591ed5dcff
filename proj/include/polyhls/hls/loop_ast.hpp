//===- loop_ast.hpp - Standard-level loop program ---------------*- C++ -*-===//
//
// The level below the affine IR: every bound, operand and condition is an
// explicit integer expression over loop variables and symbols. Loops run
// from `lower` to `upper` inclusive with step 1; a parallel loop is an
// ordinary sequential loop carrying an annotation.
//
//===----------------------------------------------------------------------===//

#pragma once

#include "polyhls/ir/ir.hpp"

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace polyhls::hls {

using frontend::ElemKind;

enum class IExprKind { Const, Var, Add, Sub, Mul, FloorDiv, CeilDiv, Mod, Max, Min };

struct IExpr {
  IExprKind kind = IExprKind::Const;
  Int value = 0;
  std::string name;
  /// Two operands for the arithmetic kinds, one or more for Max/Min.
  std::vector<IExpr> operands;

  static IExpr constant(Int v);
  static IExpr var(std::string name);
  static IExpr binary(IExprKind kind, IExpr a, IExpr b);
  /// Folds to a constant when every operand is one.
  static IExpr nary(IExprKind kind, std::vector<IExpr> ops);

  bool is_const() const { return kind == IExprKind::Const; }

  friend bool operator==(const IExpr &, const IExpr &) = default;
};

/// `expr >= 0`, or `expr == 0` for equalities.
struct LCond {
  IExpr expr;
  bool equality = false;

  friend bool operator==(const LCond &, const LCond &) = default;
};

struct LStmt;
using LBlock = std::vector<LStmt>;

struct LFor {
  std::string var;
  IExpr lower;
  IExpr upper;
  bool parallel = false;
  /// HLS directives; inert for execution.
  bool pipeline = false;
  std::optional<Int> unroll;
  LBlock body;
};

struct LIf {
  /// Conjunction.
  std::vector<LCond> conds;
  LBlock then_body;
  LBlock else_body;
};

struct LCall {
  std::string callee;
  std::vector<IExpr> args;
};

struct LStmt {
  std::variant<LFor, LIf, LCall> node;
};

bool operator==(const LFor &a, const LFor &b);
bool operator==(const LIf &a, const LIf &b);
bool operator==(const LCall &a, const LCall &b);
bool operator==(const LStmt &a, const LStmt &b);

struct LArray {
  std::string name;
  ElemKind elem = ElemKind::Float64;
  /// Over the symbols.
  std::vector<IExpr> extents;

  friend bool operator==(const LArray &, const LArray &) = default;
};

struct LoopProgram {
  std::string name;
  std::vector<std::string> symbols;
  std::vector<LArray> arrays;
  std::vector<ir::StmtDef> statements;
  LBlock body;

  const ir::StmtDef *find_statement(std::string_view name) const;
  friend bool operator==(const LoopProgram &, const LoopProgram &) = default;
};

/// Expression of `e` with d<k> named dims[k] and s<k> named syms[k].
IExpr lower_expr(const affine::AffineExpr &e, const std::vector<std::string> &dims,
                 const std::vector<std::string> &syms);

/// Equivalent conditions without existentials; Unsupported when the
/// quantified variables cannot be eliminated exactly.
std::vector<LCond> lower_condition(const affine::IntegerSet &cond,
                                   const std::vector<std::string> &dims,
                                   const std::vector<std::string> &syms);

LoopProgram lower_to_standard(const ir::Module &m);

Int evaluate(const IExpr &e, const std::vector<std::pair<std::string, Int>> &env);

/// C-like text: `floordiv(N-1, 16)`, `max(0, 32*t1-N+1)`.
std::string to_string(const IExpr &e);
/// C spelling with the floord/ceild/floormod/max/min helpers.
std::string to_c(const IExpr &e);
std::string print_loops(const LoopProgram &p);
std::string print_loops(const std::vector<LoopProgram> &ps);

} // namespace polyhls::hls
