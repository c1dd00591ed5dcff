//===- deps.hpp - Memory-based data dependences -----------------*- C++ -*-===//
//
// A dependence relates a source instance s and a target instance t that touch
// the same array cell, at least one of them writing, with s scheduled before
// t. Relations are split by the first schedule position at which the two time
// vectors differ, so each relation is a single conjunction over
// (source dims ++ target dims ++ symbols).
//
//===----------------------------------------------------------------------===//

#pragma once

#include "polyhls/scop/scop.hpp"

#include <optional>
#include <string>
#include <vector>

namespace polyhls::deps {

enum class DepKind { Flow, Anti, Output };

const char *to_string(DepKind kind);

struct Dependence {
  std::string source;
  std::string target;
  DepKind kind = DepKind::Flow;
  std::string array;
  /// Schedule position carrying the dependence.
  unsigned level = 0;
  /// Number of relation dims belonging to the source instance.
  unsigned source_dims = 0;
  affine::IntegerSet relation;
  /// t - s over the loops enclosing both statements, when constant.
  std::optional<std::vector<Int>> distance;
};

/// Every non-empty RAW/WAR/WAW relation of the scop under its current
/// schedules. Relations whose emptiness cannot be proved are kept.
std::vector<Dependence> compute_dependences(const scop::Scop &scop);

/// The constant t - s over the first `depth` dims of both sides, if the
/// relation forces one; nullopt when the difference varies or the relation
/// is empty.
std::optional<std::vector<Int>> distance_vector(const Dependence &dep, unsigned depth);

/// Schedule-time difference at `pos` for the two sides of `dep`, as an
/// expression over the relation's dims.
affine::AffineExpr time_difference(const scop::Scop &scop, const Dependence &dep, unsigned pos);

/// True iff no dependence has a non-zero time difference at schedule
/// position `pos` while all earlier positions are equal.
bool is_loop_parallel(const scop::Scop &scop, const std::vector<Dependence> &deps, unsigned pos);

/// `S1 -> S1 : flow : distance (1,0)` lines, each followed by the relation.
std::string dump_dependences(const std::vector<Dependence> &deps);

} // namespace polyhls::deps
