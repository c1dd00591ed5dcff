//===- transforms.hpp - Schedule transformations ----------------*- C++ -*-===//
//
// Schedules keep the interleaved layout (beta0, L0, beta1, L1, ..., betaD):
// even positions are statement-order constants and loop level l lives at
// position 2l+1. A statement has loops at levels [0, num_dims).
//
// Every transform checks that the dependences of its input still run
// forwards under the new schedules and fails with IllegalTransform otherwise.
//
//===----------------------------------------------------------------------===//

#pragma once

#include "polyhls/scop/scop.hpp"

#include <optional>
#include <vector>

namespace polyhls::transform {

inline unsigned loop_position(unsigned level) { return 2 * level + 1; }

/// Number of loop levels in the scop's schedule space.
unsigned num_loop_levels(const scop::Scop &scop);

struct TilingSpec {
  std::vector<Int> sizes;
  /// First tiled loop level; by default the band is the innermost
  /// `sizes.size()` levels of the deepest statement.
  std::optional<unsigned> first_level;
};

/// Rectangular tiling of a permutable band. For each band level with
/// schedule expression f and size s, a tile dim T is appended to every
/// statement inside the band with s*T <= f <= s*T + s-1, and T is scheduled
/// before the band's point loops.
scop::Scop tile(const scop::Scop &scop, const TilingSpec &spec);

/// Loop level `a` becomes a + factor * b.
scop::Scop skew(const scop::Scop &scop, unsigned a, unsigned b, Int factor);

/// On the innermost tile band: the first tile dim becomes the sum of all the
/// band's tile dims; the remaining tile dims are marked parallel where the
/// dependence test confirms it.
scop::Scop wavefront(const scop::Scop &scop);

/// Tiling whose point loops always scan the full tile box; the statement's
/// original domain becomes a guard.
scop::Scop sub_bounding_box_tile(const scop::Scop &scop, const TilingSpec &spec);

/// Throws IllegalTransform unless every dependence of `before` runs forwards
/// under the schedules of `after` (same statements, dims extended at the end).
void check_legal(const scop::Scop &before, const scop::Scop &after, const char *pass);

} // namespace polyhls::transform
