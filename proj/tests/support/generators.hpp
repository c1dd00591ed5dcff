// Hand-rolled random generators for property tests.
#pragma once

#include "polyhls/frontend/ast.hpp"

#include <random>

namespace testing {

// A syntactically valid program: symbols N and M, a few arrays, one scop of
// random nested loops, guards and assignments. Not necessarily in-bounds.
// With `modelable`, else branches only follow a single strict or non-strict
// inequality, so every statement has a convex domain.
polyhls::frontend::Program random_program(std::mt19937_64 &rng, bool modelable = false);

} // namespace testing

#include "polyhls/ir/ir.hpp"

namespace testing {

// A well-formed affine module: symbols N and M, arrays A and B, statements
// of arity 0..3 and random nests of loops, conditions and calls whose bound
// and operand expressions mix loop variables, symbols and floor/ceil
// divisions.
polyhls::ir::Module random_module(std::mt19937_64 &rng);

} // namespace testing
