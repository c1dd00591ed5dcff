//===- fm.hpp - Projection, emptiness and bound extraction ------*- C++ -*-===//
//
// Fourier-Motzkin elimination with integer tightening of every derived row.
//
//  * The real shadow (ShadowKind::Real) over-approximates the integer
//    projection; it is exact whenever each eliminated lower/upper pair has a
//    unit coefficient on one side.
//  * The dark shadow (ShadowKind::Dark) under-approximates it: every point in
//    the dark shadow has an integer pre-image.
//
// Emptiness is decided by the real shadow; when no symbols remain the answer
// is made exact by a bounded search for an integer point.
//
//===----------------------------------------------------------------------===//

#pragma once

#include "polyhls/affine/set.hpp"

#include <optional>
#include <vector>

namespace polyhls::affine {

enum class ShadowKind { Real, Dark };

struct Projection {
  IntegerSet set;
  /// True when the integer points of the result are exactly the projection
  /// of the input's integer points.
  bool exact = true;
};

/// Eliminates one variable column (dim or existential) and removes it.
Projection fm_project_exact(const IntegerSet &set, unsigned var,
                            ShadowKind shadow = ShadowKind::Real);

inline IntegerSet fm_project(const IntegerSet &set, unsigned var) {
  return fm_project_exact(set, var).set;
}

/// Eliminates several variables (any order is chosen internally) and removes
/// their columns; the remaining columns keep their relative order.
Projection project_out(const IntegerSet &set, std::vector<unsigned> vars,
                       ShadowKind shadow = ShadowKind::Real);

/// Eliminates every variable and symbol; true if that proves infeasibility,
/// or, when the set has no symbols, if an exact search finds no point.
bool is_empty(const IntegerSet &set);

/// Exact search. The set must have no symbols. Returns a point over all
/// variables (dims then existentials), or nullopt when none exists. Throws
/// Unbounded if a variable is unbounded.
std::optional<std::vector<Int>> find_point(const IntegerSet &set);

/// All integer points (dims only, existentials projected exactly) of a set
/// without symbols, in lexicographic order.
std::vector<std::vector<Int>> enumerate_points(const IntegerSet &set);
std::vector<std::vector<Int>> enumerate_points(const IntegerSet &set,
                                               std::span<const Int> syms);

struct DimBounds {
  std::vector<AffineExpr> lower;
  std::vector<AffineExpr> upper;
};

/// Bounds of `dim` in terms of dims < `dim` and symbols, after projecting
/// out every inner dim and all existentials. The dim ranges over
/// [max(lower), min(upper)]. Throws Unbounded if either side is missing.
DimBounds bounds_for_dim(const IntegerSet &set, unsigned dim);

/// Deterministic order for bound lists: constants, then symbol-only
/// expressions, then by innermost dim referenced.
void sort_bounds(std::vector<AffineExpr> &exprs);

} // namespace polyhls::affine
