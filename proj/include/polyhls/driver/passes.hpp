//===- passes.hpp - Transformation pass flags -------------------*- C++ -*-===//
//
//   -tile=S1,S2,...     tile the innermost band with the given sizes
//   -skew=A,B,F         loop level A becomes A + F*B
//   -wavefront          wavefront the innermost tile band
//   -subbb-tile=S1,...  sub-bounding-box tiling
//
//===----------------------------------------------------------------------===//

#pragma once

#include "polyhls/scop/scop.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace polyhls::driver {

enum class PassKind { Tile, Skew, Wavefront, SubBBTile };

struct Pass {
  PassKind kind = PassKind::Tile;
  std::vector<Int> args;

  /// The flag as it would be written on the command line.
  std::string spelling() const;
  friend bool operator==(const Pass &, const Pass &) = default;
};

/// Nullopt when `arg` is not a pass flag; InvalidArgument when it is one
/// with malformed arguments.
std::optional<Pass> parse_pass_flag(std::string_view arg);

scop::Scop apply_pass(const scop::Scop &scop, const Pass &pass);

} // namespace polyhls::driver
