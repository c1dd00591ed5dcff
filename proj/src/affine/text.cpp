//===- text.cpp - Affine map / integer set parser and printer -------------===//

#include "polyhls/affine/text.hpp"

#include <map>

namespace polyhls::affine {

namespace {

class ExprParser {
public:
  ExprParser(TokenStream &ts, const IdentResolver &resolve) : ts_(ts), resolve_(resolve) {}

  AffineExpr sum() {
    AffineExpr e = product();
    for (;;) {
      if (ts_.accept("+"))
        e += product();
      else if (ts_.accept("-"))
        e -= product();
      else
        return e;
    }
  }

private:
  AffineExpr product() {
    AffineExpr e = unary();
    for (;;) {
      if (ts_.is("*")) {
        const Token &op = ts_.next();
        AffineExpr rhs = unary();
        if (rhs.is_constant())
          e = e * rhs.constant_term();
        else if (e.is_constant())
          e = rhs * e.constant_term();
        else
          ts_.error_at(op, "non-affine product: one factor must be a constant");
      } else if (ts_.accept("floordiv")) {
        e = e.floor_div(divisor());
      } else if (ts_.accept("ceildiv")) {
        e = e.ceil_div(divisor());
      } else if (ts_.accept("mod")) {
        e = e.mod(divisor());
      } else {
        return e;
      }
    }
  }

  Int divisor() {
    const Token &tok = ts_.peek();
    AffineExpr d = unary();
    if (!d.is_constant() || d.constant_term() <= 0)
      ts_.error_at(tok, "divisor must be a positive integer constant");
    return d.constant_term();
  }

  AffineExpr unary() {
    if (ts_.accept("-"))
      return -unary();
    if (ts_.accept("+"))
      return unary();
    return primary();
  }

  AffineExpr primary() {
    const Token &tok = ts_.peek();
    if (tok.kind == TokenKind::Integer) {
      ts_.next();
      return AffineExpr(tok.int_value);
    }
    if (ts_.accept("(")) {
      AffineExpr e = sum();
      ts_.expect(")");
      return e;
    }
    if (tok.kind == TokenKind::Ident) {
      std::string name = ts_.next().text;
      if ((name == "floord" || name == "ceild") && ts_.is("(")) {
        ts_.expect("(");
        AffineExpr num = sum();
        ts_.expect(",");
        Int d = divisor();
        ts_.expect(")");
        return name == "floord" ? num.floor_div(d) : num.ceil_div(d);
      }
      if (resolve_) {
        if (auto e = resolve_(name))
          return *e;
      }
      throw Error(ErrorKind::UnknownReference, tok.loc,
                  "unknown identifier '" + name + "' in affine expression");
    }
    ts_.error_at(tok, "expected an affine expression, found '" + tok.text + "'");
  }

  TokenStream &ts_;
  const IdentResolver &resolve_;
};

std::vector<std::string> name_list(TokenStream &ts, std::string_view open,
                                   std::string_view close) {
  std::vector<std::string> names;
  ts.expect(open);
  if (ts.accept(close))
    return names;
  do {
    names.push_back(ts.expect_ident("identifier").text);
  } while (ts.accept(","));
  ts.expect(close);
  return names;
}

struct Header {
  std::vector<std::string> dims, exists, syms;
  std::map<std::string, AffineExpr, std::less<>> table;

  IdentResolver resolver() const {
    return [this](std::string_view n) -> std::optional<AffineExpr> {
      auto it = table.find(n);
      if (it == table.end())
        return std::nullopt;
      return it->second;
    };
  }
};

Header parse_header(TokenStream &ts, bool allow_exists) {
  Header h;
  h.dims = name_list(ts, "(", ")");
  if (ts.is("["))
    h.syms = name_list(ts, "[", "]");
  if (allow_exists && ts.accept("exists"))
    h.exists = name_list(ts, "(", ")");
  auto bind = [&](const std::string &n, AffineExpr e) {
    if (!h.table.emplace(n, std::move(e)).second)
      ts.error("duplicate identifier '" + n + "' in header");
  };
  for (unsigned i = 0; i < h.dims.size(); ++i)
    bind(h.dims[i], AffineExpr::dim(i));
  for (unsigned i = 0; i < h.exists.size(); ++i)
    bind(h.exists[i], AffineExpr::dim(static_cast<unsigned>(h.dims.size()) + i));
  for (unsigned i = 0; i < h.syms.size(); ++i)
    bind(h.syms[i], AffineExpr::symbol(i));
  return h;
}

NameTable default_names(unsigned dims, unsigned exists, unsigned syms) {
  NameTable names;
  for (unsigned i = 0; i < dims; ++i)
    names.dims.push_back("d" + std::to_string(i));
  for (unsigned i = 0; i < exists; ++i)
    names.dims.push_back("e" + std::to_string(i));
  for (unsigned i = 0; i < syms; ++i)
    names.symbols.push_back("s" + std::to_string(i));
  return names;
}

std::string join_names(const std::vector<std::string> &names) {
  std::string out;
  for (std::size_t i = 0; i < names.size(); ++i)
    out += (i ? "," : "") + names[i];
  return out;
}

void expect_finished(TokenStream &ts) {
  if (!ts.at_end())
    ts.error("unexpected trailing input '" + ts.peek().text + "'");
}

} // namespace

AffineExpr parse_affine_expr(TokenStream &ts, const IdentResolver &resolve) {
  return ExprParser(ts, resolve).sum();
}

AffineExpr parse_affine_expr(std::string_view text, const IdentResolver &resolve) {
  TokenStream ts(text);
  AffineExpr e = parse_affine_expr(ts, resolve);
  expect_finished(ts);
  return e;
}

AffineMap parse_affine_map(TokenStream &ts) {
  bool wrapped = ts.accept("affine_map");
  if (wrapped)
    ts.expect("<");
  Header h = parse_header(ts, false);
  ts.expect("->");
  ts.expect("(");
  std::vector<AffineExpr> results;
  IdentResolver r = h.resolver();
  if (!ts.is(")")) {
    do {
      results.push_back(parse_affine_expr(ts, r));
    } while (ts.accept(","));
  }
  ts.expect(")");
  if (wrapped)
    ts.expect(">");
  return AffineMap(static_cast<unsigned>(h.dims.size()),
                   static_cast<unsigned>(h.syms.size()), std::move(results));
}

AffineMap parse_affine_map(std::string_view text) {
  TokenStream ts(text);
  AffineMap m = parse_affine_map(ts);
  expect_finished(ts);
  return m;
}

IntegerSet parse_integer_set(TokenStream &ts) {
  bool wrapped = ts.accept("integer_set");
  if (wrapped)
    ts.expect("<");
  Header h = parse_header(ts, true);
  ts.expect(":");
  ts.expect("(");
  IntegerSet set(static_cast<unsigned>(h.dims.size()), static_cast<unsigned>(h.syms.size()));
  set.append_exists(static_cast<unsigned>(h.exists.size()));
  IdentResolver r = h.resolver();
  if (!ts.is(")")) {
    do {
      AffineExpr lhs = parse_affine_expr(ts, r);
      const Token &op = ts.next();
      AffineExpr rhs = parse_affine_expr(ts, r);
      if (op.text == ">=")
        set.add_inequality(lhs - rhs);
      else if (op.text == "<=")
        set.add_inequality(rhs - lhs);
      else if (op.text == "==")
        set.add_equality(lhs - rhs);
      else
        ts.error_at(op, "expected '>=', '<=' or '==' in constraint");
    } while (ts.accept(","));
  }
  ts.expect(")");
  if (wrapped)
    ts.expect(">");
  return set;
}

IntegerSet parse_integer_set(std::string_view text) {
  TokenStream ts(text);
  IntegerSet s = parse_integer_set(ts);
  expect_finished(ts);
  return s;
}

std::string print_affine_map_body(const AffineMap &map) {
  NameTable names = default_names(map.num_dims(), 0, map.num_symbols());
  std::string out = "(" + join_names(names.dims) + ")";
  if (map.num_symbols() > 0)
    out += "[" + join_names(names.symbols) + "]";
  out += " -> (";
  for (unsigned i = 0; i < map.num_results(); ++i)
    out += (i ? ", " : "") + to_string(map.result(i), names);
  return out + ")";
}

std::string print_affine_map(const AffineMap &map) {
  return "affine_map<" + print_affine_map_body(map) + ">";
}

std::string print_constraints(const IntegerSet &set, const NameTable &given) {
  NameTable names = default_names(set.num_dims(), set.num_exists(), set.num_symbols());
  for (std::size_t i = 0; i < given.dims.size() && i < names.dims.size(); ++i)
    names.dims[i] = given.dims[i];
  for (std::size_t i = 0; i < given.symbols.size() && i < names.symbols.size(); ++i)
    names.symbols[i] = given.symbols[i];
  if (set.rows().empty())
    return "0 == 0";
  std::string out;
  bool first = true;
  for (const Row &r : set.rows()) {
    out += first ? "" : ", ";
    out += to_string(set.row_expr(r), names) + (r.equality ? " == 0" : " >= 0");
    first = false;
  }
  return out;
}

std::string print_integer_set_body(const IntegerSet &set) {
  NameTable names = default_names(set.num_dims(), set.num_exists(), set.num_symbols());
  std::vector<std::string> dims(names.dims.begin(), names.dims.begin() + set.num_dims());
  std::vector<std::string> exists(names.dims.begin() + set.num_dims(), names.dims.end());
  std::string out = "(" + join_names(dims) + ")";
  if (set.num_symbols() > 0)
    out += "[" + join_names(names.symbols) + "]";
  if (!exists.empty())
    out += " exists(" + join_names(exists) + ")";
  return out + " : (" + print_constraints(set) + ")";
}

std::string print_integer_set(const IntegerSet &set) {
  return "integer_set<" + print_integer_set_body(set) + ">";
}

} // namespace polyhls::affine
