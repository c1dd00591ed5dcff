//===- codegen.hpp - Scanning scheduled polyhedra into loops ----*- C++ -*-===//
//
// Schedule positions are visited outermost first. A position where every
// statement of the current group has a constant time value orders the group
// into a sequence; any other position becomes a loop whose bounds come from
// Fourier-Motzkin projection of the statements' time-space images. Statements
// sharing a loop use only bound results valid for all of them, and each call
// is guarded by the constraints its enclosing loops do not already imply.
//
//===----------------------------------------------------------------------===//

#pragma once

#include "polyhls/ir/ir.hpp"
#include "polyhls/scop/scop.hpp"

namespace polyhls::codegen {

/// Throws Unsupported when a schedule is not unimodular on its loop
/// positions or statements sharing a loop have no common bound, and
/// Unbounded when a loop has no bound. Statements with empty domains are
/// dropped.
ir::Module generate_loops(const scop::Scop &scop);

/// Removes bound results dominated by another result of the same bound
/// (under `context`, the enclosing loops and enclosing conditions).
ir::Module simplify_bounds(const ir::Module &m, const affine::IntegerSet &context);

/// One line per loop: name, depth and the inclusive bound results.
std::string dump_bounds(const ir::Module &m);

} // namespace polyhls::codegen
