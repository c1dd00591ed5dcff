//===- expr.cpp - Integer affine expressions ------------------------------===//

#include "polyhls/affine/expr.hpp"

#include <algorithm>

namespace polyhls::affine {

namespace {

int kind_rank(TermKind kind) { return static_cast<int>(kind); }

} // namespace

std::strong_ordering compare(const Term &a, const Term &b) {
  if (auto c = kind_rank(a.kind) <=> kind_rank(b.kind); c != 0)
    return c;
  if (!a.is_div())
    return a.index <=> b.index;
  if (auto c = compare(*a.inner, *b.inner); c != 0)
    return c;
  return a.divisor <=> b.divisor;
}

std::strong_ordering compare(const AffineExpr &a, const AffineExpr &b) {
  std::size_t n = std::min(a.terms_.size(), b.terms_.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (auto c = compare(a.terms_[i].first, b.terms_[i].first); c != 0)
      return c;
    if (auto c = a.terms_[i].second <=> b.terms_[i].second; c != 0)
      return c;
  }
  if (auto c = a.terms_.size() <=> b.terms_.size(); c != 0)
    return c;
  return a.constant_ <=> b.constant_;
}

AffineExpr AffineExpr::dim(unsigned index) {
  Term t;
  t.kind = TermKind::Dim;
  t.index = index;
  return from_term(t, 1);
}

AffineExpr AffineExpr::symbol(unsigned index) {
  Term t;
  t.kind = TermKind::Symbol;
  t.index = index;
  return from_term(t, 1);
}

AffineExpr AffineExpr::from_term(Term term, Int coeff) {
  AffineExpr e;
  if (coeff != 0)
    e.terms_.emplace_back(std::move(term), coeff);
  return e;
}

void AffineExpr::add_term(const Term &term, Int coeff) {
  if (coeff == 0)
    return;
  auto it = std::lower_bound(
      terms_.begin(), terms_.end(), term,
      [](const auto &entry, const Term &t) { return compare(entry.first, t) < 0; });
  if (it != terms_.end() && compare(it->first, term) == 0) {
    it->second = checked::add(it->second, coeff);
    if (it->second == 0)
      terms_.erase(it);
    return;
  }
  terms_.insert(it, {term, coeff});
}

AffineExpr operator+(const AffineExpr &a, const AffineExpr &b) {
  AffineExpr r = a;
  for (const auto &[term, coeff] : b.terms_)
    r.add_term(term, coeff);
  r.constant_ = checked::add(r.constant_, b.constant_);
  return r;
}

AffineExpr operator-(const AffineExpr &a) { return a * -1; }

AffineExpr operator-(const AffineExpr &a, const AffineExpr &b) {
  return a + (-b);
}

AffineExpr operator*(const AffineExpr &a, Int c) {
  if (c == 0)
    return AffineExpr();
  AffineExpr r;
  r.terms_.reserve(a.terms_.size());
  for (const auto &[term, coeff] : a.terms_)
    r.terms_.emplace_back(term, checked::mul(coeff, c));
  r.constant_ = checked::mul(a.constant_, c);
  return r;
}

AffineExpr AffineExpr::div_like(TermKind kind, Int d) const {
  if (d <= 0)
    fail(ErrorKind::Malformed,
         "divisor must be a positive constant, got " + std::to_string(d));
  if (d == 1)
    return kind == TermKind::Mod ? AffineExpr() : *this;
  if (is_constant()) {
    switch (kind) {
    case TermKind::FloorDiv:
      return checked::floor_div(constant_, d);
    case TermKind::CeilDiv:
      return checked::ceil_div(constant_, d);
    default:
      return checked::mod(constant_, d);
    }
  }

  // (g*e) op (g*d) == e op d for floor/ceil, and g*(e mod d) for mod.
  Int g = d;
  g = checked::gcd(g, constant_);
  for (const auto &entry : terms_)
    g = checked::gcd(g, entry.second);
  if (g > 1) {
    AffineExpr reduced;
    for (const auto &[term, coeff] : terms_)
      reduced.terms_.emplace_back(term, coeff / g);
    reduced.constant_ = constant_ / g;
    AffineExpr inner = reduced.div_like(kind, d / g);
    return kind == TermKind::Mod ? inner * g : inner;
  }

  bool all_divisible = std::all_of(terms_.begin(), terms_.end(),
                                   [d](const auto &e) { return e.second % d == 0; });
  if (all_divisible) {
    AffineExpr q;
    for (const auto &[term, coeff] : terms_)
      q.terms_.emplace_back(term, coeff / d);
    switch (kind) {
    case TermKind::FloorDiv:
      return q + checked::floor_div(constant_, d);
    case TermKind::CeilDiv:
      return q + checked::ceil_div(constant_, d);
    default:
      return checked::mod(constant_, d);
    }
  }

  Term t;
  t.kind = kind;
  t.inner = std::make_shared<const AffineExpr>(*this);
  t.divisor = d;
  return from_term(std::move(t), 1);
}

AffineExpr AffineExpr::floor_div(Int d) const { return div_like(TermKind::FloorDiv, d); }
AffineExpr AffineExpr::ceil_div(Int d) const { return div_like(TermKind::CeilDiv, d); }
AffineExpr AffineExpr::mod(Int d) const { return div_like(TermKind::Mod, d); }

bool AffineExpr::is_linear() const {
  return std::none_of(terms_.begin(), terms_.end(),
                      [](const auto &e) { return e.first.is_div(); });
}

Int AffineExpr::dim_coeff(unsigned index) const {
  for (const auto &[term, coeff] : terms_)
    if (term.kind == TermKind::Dim && term.index == index)
      return coeff;
  return 0;
}

Int AffineExpr::symbol_coeff(unsigned index) const {
  for (const auto &[term, coeff] : terms_)
    if (term.kind == TermKind::Symbol && term.index == index)
      return coeff;
  return 0;
}

std::optional<unsigned> AffineExpr::as_dim() const {
  if (constant_ != 0 || terms_.size() != 1)
    return std::nullopt;
  const auto &[term, coeff] = terms_.front();
  if (term.kind != TermKind::Dim || coeff != 1)
    return std::nullopt;
  return term.index;
}

unsigned AffineExpr::dim_extent() const {
  unsigned n = 0;
  for (const auto &[term, coeff] : terms_) {
    if (term.kind == TermKind::Dim)
      n = std::max(n, term.index + 1);
    else if (term.is_div())
      n = std::max(n, term.inner->dim_extent());
  }
  return n;
}

unsigned AffineExpr::symbol_extent() const {
  unsigned n = 0;
  for (const auto &[term, coeff] : terms_) {
    if (term.kind == TermKind::Symbol)
      n = std::max(n, term.index + 1);
    else if (term.is_div())
      n = std::max(n, term.inner->symbol_extent());
  }
  return n;
}

bool AffineExpr::uses_dim(unsigned index) const {
  for (const auto &[term, coeff] : terms_) {
    if (term.kind == TermKind::Dim && term.index == index)
      return true;
    if (term.is_div() && term.inner->uses_dim(index))
      return true;
  }
  return false;
}

bool AffineExpr::uses_symbols() const { return symbol_extent() > 0; }

Int AffineExpr::evaluate(std::span<const Int> dims, std::span<const Int> syms) const {
  Int acc = constant_;
  for (const auto &[term, coeff] : terms_) {
    Int v = 0;
    switch (term.kind) {
    case TermKind::Dim:
      if (term.index >= dims.size())
        fail(ErrorKind::Malformed,
             "dimension d" + std::to_string(term.index) + " out of range");
      v = dims[term.index];
      break;
    case TermKind::Symbol:
      if (term.index >= syms.size())
        fail(ErrorKind::Malformed,
             "symbol s" + std::to_string(term.index) + " out of range");
      v = syms[term.index];
      break;
    case TermKind::FloorDiv:
      v = checked::floor_div(term.inner->evaluate(dims, syms), term.divisor);
      break;
    case TermKind::CeilDiv:
      v = checked::ceil_div(term.inner->evaluate(dims, syms), term.divisor);
      break;
    case TermKind::Mod:
      v = checked::mod(term.inner->evaluate(dims, syms), term.divisor);
      break;
    }
    acc = checked::add(acc, checked::mul(coeff, v));
  }
  return acc;
}

AffineExpr AffineExpr::substitute(std::span<const AffineExpr> dim_repl,
                                  std::span<const AffineExpr> sym_repl) const {
  AffineExpr r(constant_);
  for (const auto &[term, coeff] : terms_) {
    switch (term.kind) {
    case TermKind::Dim:
      if (term.index >= dim_repl.size())
        fail(ErrorKind::Malformed,
             "no replacement for d" + std::to_string(term.index));
      r += dim_repl[term.index] * coeff;
      break;
    case TermKind::Symbol:
      if (term.index >= sym_repl.size())
        fail(ErrorKind::Malformed,
             "no replacement for s" + std::to_string(term.index));
      r += sym_repl[term.index] * coeff;
      break;
    default:
      r += term.inner->substitute(dim_repl, sym_repl).div_like(term.kind, term.divisor) *
           coeff;
      break;
    }
  }
  return r;
}

std::string NameTable::dim(unsigned index) const {
  if (index < dims.size())
    return dims[index];
  return "d" + std::to_string(index);
}

std::string NameTable::symbol(unsigned index) const {
  if (index < symbols.size())
    return symbols[index];
  return "s" + std::to_string(index);
}

namespace {

bool is_atomic(const AffineExpr &e) {
  if (e.is_constant())
    return e.constant_term() >= 0;
  if (e.constant_term() != 0 || e.terms().size() != 1)
    return false;
  const auto &[term, coeff] = e.terms().front();
  return coeff == 1 && !term.is_div();
}

std::string div_keyword(TermKind kind) {
  switch (kind) {
  case TermKind::FloorDiv:
    return "floordiv";
  case TermKind::CeilDiv:
    return "ceildiv";
  default:
    return "mod";
  }
}

// Prints |coeff| * term; the sign is handled by the caller.
std::string print_term(const Term &term, Int abs_coeff, bool leading_negative,
                       const NameTable &names) {
  std::string body;
  switch (term.kind) {
  case TermKind::Dim:
    body = names.dim(term.index);
    break;
  case TermKind::Symbol:
    body = names.symbol(term.index);
    break;
  default: {
    std::string inner = to_string(*term.inner, names);
    if (!is_atomic(*term.inner))
      inner = "(" + inner + ")";
    body = inner + " " + div_keyword(term.kind) + " " + std::to_string(term.divisor);
    if (abs_coeff != 1 || leading_negative)
      body = "(" + body + ")";
    break;
  }
  }
  if (abs_coeff != 1)
    body += "*" + std::to_string(abs_coeff);
  return body;
}

} // namespace

std::string to_string(const AffineExpr &expr, const NameTable &names) {
  if (expr.terms().empty())
    return std::to_string(expr.constant_term());
  std::string out;
  bool first = true;
  bool prev_div = false;
  for (const auto &[term, coeff] : expr.terms()) {
    bool negative = coeff < 0;
    Int mag = negative ? checked::neg(coeff) : coeff;
    bool spaced = prev_div || term.is_div();
    if (first) {
      if (negative)
        out += "-";
      out += print_term(term, mag, negative, names);
    } else {
      out += spaced ? (negative ? " - " : " + ") : (negative ? "-" : "+");
      out += print_term(term, mag, false, names);
    }
    first = false;
    prev_div = term.is_div();
  }
  Int c = expr.constant_term();
  if (c != 0) {
    bool negative = c < 0;
    out += prev_div ? (negative ? " - " : " + ") : (negative ? "-" : "+");
    // Avoid negating INT64_MIN: print its digits directly.
    std::string digits = std::to_string(c);
    out += negative ? digits.substr(1) : digits;
  }
  return out;
}

} // namespace polyhls::affine
