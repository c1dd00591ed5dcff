//===- expr.hpp - Integer affine expressions --------------------*- C++ -*-===//
//
// An AffineExpr is kept in a canonical flattened form: a sorted sum of
// coefficient * term plus a constant, where a term is a dimension, a symbol,
// or a floordiv/ceildiv/mod of a nested expression by a positive constant.
// Two expressions denoting the same tree after canonicalization compare equal.
//
//===----------------------------------------------------------------------===//

#pragma once

#include "polyhls/support/checked.hpp"

#include <compare>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace polyhls::affine {

class AffineExpr;

enum class TermKind : std::uint8_t { Dim, Symbol, FloorDiv, CeilDiv, Mod };

struct Term {
  TermKind kind = TermKind::Dim;
  unsigned index = 0;
  std::shared_ptr<const AffineExpr> inner;
  Int divisor = 1;

  bool is_div() const { return kind != TermKind::Dim && kind != TermKind::Symbol; }
  const AffineExpr &operand() const { return *inner; }
};

std::strong_ordering compare(const Term &a, const Term &b);

class AffineExpr {
public:
  using TermList = std::vector<std::pair<Term, Int>>;

  AffineExpr() = default;
  AffineExpr(Int value) : constant_(value) {} // NOLINT: implicit by design of the algebra

  static AffineExpr constant(Int value) { return AffineExpr(value); }
  static AffineExpr dim(unsigned index);
  static AffineExpr symbol(unsigned index);

  AffineExpr floor_div(Int divisor) const;
  AffineExpr ceil_div(Int divisor) const;
  AffineExpr mod(Int divisor) const;

  friend AffineExpr operator+(const AffineExpr &a, const AffineExpr &b);
  friend AffineExpr operator-(const AffineExpr &a, const AffineExpr &b);
  friend AffineExpr operator-(const AffineExpr &a);
  friend AffineExpr operator*(const AffineExpr &a, Int c);
  friend AffineExpr operator*(Int c, const AffineExpr &a) { return a * c; }
  AffineExpr &operator+=(const AffineExpr &o) { return *this = *this + o; }
  AffineExpr &operator-=(const AffineExpr &o) { return *this = *this - o; }

  const TermList &terms() const { return terms_; }
  Int constant_term() const { return constant_; }

  bool is_constant() const { return terms_.empty(); }
  /// True when no floordiv/ceildiv/mod term occurs.
  bool is_linear() const;
  bool is_zero() const { return terms_.empty() && constant_ == 0; }

  /// Coefficient of a top-level dim/symbol term (0 if absent).
  Int dim_coeff(unsigned index) const;
  Int symbol_coeff(unsigned index) const;

  /// The index of the dim when the expression is exactly `d<k>`.
  std::optional<unsigned> as_dim() const;

  /// 1 + highest dim index referenced anywhere (0 if none).
  unsigned dim_extent() const;
  unsigned symbol_extent() const;
  bool uses_dim(unsigned index) const;
  bool uses_symbols() const;

  Int evaluate(std::span<const Int> dims, std::span<const Int> syms) const;

  /// Replaces d<k> by dim_repl[k] and s<k> by sym_repl[k] (pointwise
  /// composition). Missing replacements are a malformed-expression error.
  AffineExpr substitute(std::span<const AffineExpr> dim_repl,
                        std::span<const AffineExpr> sym_repl) const;

  friend std::strong_ordering compare(const AffineExpr &a, const AffineExpr &b);
  friend bool operator==(const AffineExpr &a, const AffineExpr &b) {
    return compare(a, b) == std::strong_ordering::equal;
  }
  friend bool operator<(const AffineExpr &a, const AffineExpr &b) {
    return compare(a, b) == std::strong_ordering::less;
  }

private:
  static AffineExpr from_term(Term term, Int coeff);
  AffineExpr div_like(TermKind kind, Int divisor) const;
  void add_term(const Term &term, Int coeff);

  TermList terms_;
  Int constant_ = 0;
};

/// Naming used when printing: defaults are d0.. and s0...
struct NameTable {
  std::vector<std::string> dims;
  std::vector<std::string> symbols;

  std::string dim(unsigned index) const;
  std::string symbol(unsigned index) const;
};

/// Canonical text, e.g. "(s0-1) floordiv 16 + 1" or "d0*32-d1*32+32".
std::string to_string(const AffineExpr &expr, const NameTable &names = {});

/// Resolves an identifier to an expression (normally a dim or a symbol).
using IdentResolver = std::function<std::optional<AffineExpr>(std::string_view)>;

} // namespace polyhls::affine
