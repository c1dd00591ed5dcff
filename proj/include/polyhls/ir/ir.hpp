//===- ir.hpp - Affine loop IR ----------------------------------*- C++ -*-===//
//
// Loops bounded by the max of lower-bound results and the min of upper-bound
// results, affine conditionals and calls to statement bodies. Bound, operand
// and condition expressions use d<k> for the k-th enclosing loop variable
// (outermost first) and s<k> for the module symbols. Both bounds are
// inclusive in memory; the text format prints upper bounds exclusively. A
// bound may also be written as a single inline expression such as `%N`.
//
// Text format:
//
//   #map0 = affine_map<()[s0] -> ((s0-1) floordiv 16 + 1)>
//   affine.module @scop0 symbols(%N) {
//     array @A : float[%N][%N]
//     stmt @S1(i, j) { A[i][j] = A[i-1][j] + A[i][j-1]; }
//     affine.for %t1 = 0 to #map0()[%N] {
//       affine.parallel_for %t2 = max #map1(%t1)[%N] to min #map2(%t1)[%N] {
//         affine.if #set0(%t1, %t2)[%N] { ... } else { ... }
//         call @S1(%t1, %t2-%t1)
//       }
//     }
//   }
//
//===----------------------------------------------------------------------===//

#pragma once

#include "polyhls/affine/set.hpp"
#include "polyhls/frontend/ast.hpp"

#include <string>
#include <variant>
#include <vector>

namespace polyhls::ir {

using affine::AffineExpr;
using affine::IntegerSet;
using frontend::ElemKind;

struct ArrayDef {
  std::string name;
  ElemKind elem = ElemKind::Float64;
  /// Over the module symbols.
  std::vector<AffineExpr> extents;
};

struct StmtDef {
  std::string name;
  std::vector<std::string> iterators;
  frontend::AssignStmt body;
};

struct Op;
using Block = std::vector<Op>;

struct ForOp {
  std::string var;
  std::vector<AffineExpr> lower;
  std::vector<AffineExpr> upper;
  bool parallel = false;
  Block body;
};

struct IfOp {
  /// Dims are the enclosing loop variables.
  IntegerSet cond;
  Block then_body;
  Block else_body;
};

struct CallOp {
  std::string callee;
  std::vector<AffineExpr> operands;
};

struct Op {
  std::variant<ForOp, IfOp, CallOp> node;
};

bool operator==(const ForOp &a, const ForOp &b);
bool operator==(const IfOp &a, const IfOp &b);
bool operator==(const CallOp &a, const CallOp &b);
bool operator==(const Op &a, const Op &b);
bool operator==(const ArrayDef &a, const ArrayDef &b);
bool operator==(const StmtDef &a, const StmtDef &b);

struct Module {
  std::string name;
  std::vector<std::string> symbols;
  std::vector<ArrayDef> arrays;
  std::vector<StmtDef> statements;
  Block body;

  const StmtDef *find_statement(std::string_view name) const;
  const ArrayDef *find_array(std::string_view name) const;
  friend bool operator==(const Module &, const Module &) = default;
};

/// The named map table as printed: bounds in first-use order, upper bounds
/// already shifted to their exclusive form. Identical maps share a name.
std::vector<std::pair<std::string, affine::AffineMap>> map_table(const std::vector<Module> &ms);

std::string print_ir(const Module &m);
/// Several modules sharing one map/set numbering.
std::string print_ir(const std::vector<Module> &ms);

/// Exactly one module.
Module parse_ir(std::string_view text);
std::vector<Module> parse_ir_file(std::string_view text);

/// One line per violated rule, naming the op; empty when well formed.
std::vector<std::string> verify_ir(const Module &m);

/// Throws Malformed listing the diagnostics, if any.
void verify_or_throw(const Module &m);

/// Number of loops on the longest nest.
unsigned loop_depth(const Block &b);

} // namespace polyhls::ir
