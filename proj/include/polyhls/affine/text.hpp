//===- text.hpp - Textual affine map / integer set syntax -------*- C++ -*-===//
//
//   affine_map<(d0,d1)[s0] -> (d0*32-d1*32, (s0-1) floordiv 16 + 1)>
//   integer_set<(d0)[s0] : (d0-1 >= 0, -d0+s0-1 >= 0)>
//   integer_set<(d0) exists(e0) : (d0-e0*2 == 0)>
//
// `*` needs a constant on one side; floordiv/ceildiv/mod need a positive
// constant divisor. `floord(e, c)` and `ceild(e, c)` are accepted as
// spellings of floordiv/ceildiv. Constraints may use >=, <= or ==; the
// printer always normalizes to `e >= 0` / `e == 0`. Whitespace is free.
//
//===----------------------------------------------------------------------===//

#pragma once

#include "polyhls/affine/set.hpp"
#include "polyhls/support/lexer.hpp"

#include <string>
#include <string_view>

namespace polyhls::affine {

AffineExpr parse_affine_expr(TokenStream &ts, const IdentResolver &resolve);
AffineExpr parse_affine_expr(std::string_view text, const IdentResolver &resolve);

/// Accepts either the bare form `(d0)[s0] -> (...)` or `affine_map<...>`.
AffineMap parse_affine_map(TokenStream &ts);
AffineMap parse_affine_map(std::string_view text);

/// Accepts either `(d0)[s0] : (...)` or `integer_set<...>`.
IntegerSet parse_integer_set(TokenStream &ts);
IntegerSet parse_integer_set(std::string_view text);

/// `(d0,d1)[s0] -> (...)`; the `[...]` part is omitted without symbols.
std::string print_affine_map_body(const AffineMap &map);
std::string print_affine_map(const AffineMap &map);

std::string print_integer_set_body(const IntegerSet &set);
std::string print_integer_set(const IntegerSet &set);

/// Constraint list only, e.g. "d0-1 >= 0, -d0+s0-1 >= 0" with custom names
/// (existentials are named after the dims unless provided).
std::string print_constraints(const IntegerSet &set, const NameTable &names = {});

} // namespace polyhls::affine
