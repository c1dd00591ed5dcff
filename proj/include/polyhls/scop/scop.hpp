//===- scop.hpp - Polyhedral model of static control parts ------*- C++ -*-===//
//
// Each statement instance is an integer point of the statement's domain.
// Domain dims are the enclosing loop iterators, outermost first, followed by
// any dims added by transformations (tile indices). Access maps read only
// the original iterators; schedules map all domain dims to a common time
// space, and instances run in lexicographic order of their time vectors.
//
//===----------------------------------------------------------------------===//

#pragma once

#include "polyhls/affine/set.hpp"
#include "polyhls/frontend/ast.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace polyhls::scop {

using frontend::ElemKind;

struct ArrayInfo {
  std::string name;
  ElemKind elem = ElemKind::Float64;
  /// Affine in the scop symbols.
  std::vector<affine::AffineExpr> extents;
};

struct Access {
  std::string array;
  /// Original iterators -> subscripts.
  affine::AffineMap map;

  friend bool operator==(const Access &, const Access &) = default;
};

struct PolyStmt {
  std::string name;
  /// Names of all domain dims; empty for dims introduced by transforms.
  std::vector<std::string> dim_names;
  /// Number of original loop iterators (a prefix of the domain dims).
  unsigned depth = 0;
  /// Textual position among siblings at each nesting level (depth + 1).
  std::vector<Int> beta;
  affine::IntegerSet domain;
  /// Extra predicate checked per instance (universe unless a transform
  /// enlarged the domain, e.g. bounding-box tiling).
  affine::IntegerSet guard;
  affine::AffineMap schedule;
  std::vector<Access> writes;
  std::vector<Access> reads;
  frontend::AssignStmt body;

  unsigned num_dims() const { return domain.num_dims(); }
  std::vector<std::string> iterators() const {
    return {dim_names.begin(), dim_names.begin() + depth};
  }
};

/// A tiled band: schedule positions of the tile dims and of the point dims
/// they cover, outermost first.
struct TileBand {
  std::vector<unsigned> tile_positions;
  std::vector<unsigned> point_positions;
  std::vector<Int> sizes;
  bool bounding_box = false;
};

struct Scop {
  std::string name;
  std::vector<std::string> symbols;
  std::vector<ArrayInfo> arrays;
  /// Over symbols only.
  affine::IntegerSet context;
  std::vector<PolyStmt> statements;
  /// Per schedule position: iterations of this time dim may run in any order.
  std::vector<bool> parallel;
  std::vector<TileBand> bands;

  unsigned schedule_dims() const {
    return statements.empty() ? 0 : statements.front().schedule.num_results();
  }
  const ArrayInfo *find_array(std::string_view name) const;
  const PolyStmt *find_statement(std::string_view name) const;
  /// Array extents for concrete symbol values.
  std::vector<Int> array_shape(const ArrayInfo &a, std::span<const Int> syms) const;
};

struct ExtractOptions {
  /// Constraints over symbols such as "N>=2"; each one replaces the default
  /// `symbol >= 1` of the symbols it mentions.
  std::vector<std::string> assumptions;
};

/// One Scop per `#pragma scop` region, named scop0, scop1, ...; statements
/// outside regions are ignored. Schedules are left empty.
std::vector<Scop> extract_scops(const frontend::Program &p, const ExtractOptions &opts = {});

/// Assigns the interleaved 2d+1 schedules (beta0, i0, beta1, ..., beta_d),
/// padded with zeros to the deepest statement.
Scop original_schedule(Scop scop);

/// extract_scops followed by original_schedule.
std::vector<Scop> build_scops(const frontend::Program &p, const ExtractOptions &opts = {});

/// Converts an affine expression of the front end; loop variables map to
/// dims by position in `dims`, declared symbols to symbols.
affine::AffineExpr to_affine(const frontend::Expr &e, const std::vector<std::string> &dims,
                             const std::vector<std::string> &symbols);

/// Parses one assumption like "N >= 2" or "2 <= N" into a constraint set.
affine::IntegerSet parse_assumption(std::string_view text,
                                    const std::vector<std::string> &symbols);

/// Text listing of arrays, domains, guards, schedules and accesses.
std::string dump_scop(const Scop &scop);

} // namespace polyhls::scop
