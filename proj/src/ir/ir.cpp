//===- ir.cpp - Affine IR printer, parser and verifier --------------------===//

#include "polyhls/ir/ir.hpp"
#include "polyhls/affine/text.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace polyhls::ir {

using affine::AffineMap;
using affine::NameTable;

bool operator==(const ForOp &a, const ForOp &b) {
  return a.var == b.var && a.lower == b.lower && a.upper == b.upper &&
         a.parallel == b.parallel && a.body == b.body;
}
bool operator==(const IfOp &a, const IfOp &b) {
  return a.cond == b.cond && a.then_body == b.then_body && a.else_body == b.else_body;
}
bool operator==(const CallOp &a, const CallOp &b) {
  return a.callee == b.callee && a.operands == b.operands;
}
bool operator==(const Op &a, const Op &b) { return a.node == b.node; }
bool operator==(const ArrayDef &a, const ArrayDef &b) {
  return a.name == b.name && a.elem == b.elem && a.extents == b.extents;
}
bool operator==(const StmtDef &a, const StmtDef &b) {
  return a.name == b.name && a.iterators == b.iterators && a.body == b.body;
}

const StmtDef *Module::find_statement(std::string_view n) const {
  for (const StmtDef &s : statements)
    if (s.name == n)
      return &s;
  return nullptr;
}

const ArrayDef *Module::find_array(std::string_view n) const {
  for (const ArrayDef &a : arrays)
    if (a.name == n)
      return &a;
  return nullptr;
}

unsigned loop_depth(const Block &b) {
  unsigned best = 0;
  for (const Op &op : b) {
    if (const auto *f = std::get_if<ForOp>(&op.node))
      best = std::max(best, 1 + loop_depth(f->body));
    else if (const auto *i = std::get_if<IfOp>(&op.node))
      best = std::max({best, loop_depth(i->then_body), loop_depth(i->else_body)});
  }
  return best;
}

namespace {

std::vector<AffineExpr> symbol_ids(unsigned n) {
  std::vector<AffineExpr> v;
  for (unsigned k = 0; k < n; ++k)
    v.push_back(AffineExpr::symbol(k));
  return v;
}

/// A map over only the loop variables it uses.
struct Applied {
  AffineMap map;
  std::vector<unsigned> dims;
  unsigned symbols = 0;
};

Applied compress(const std::vector<AffineExpr> &results, unsigned depth) {
  Applied a;
  for (const AffineExpr &e : results)
    a.symbols = std::max(a.symbols, e.symbol_extent());
  std::vector<AffineExpr> repl(depth, AffineExpr(0));
  for (unsigned d = 0; d < depth; ++d) {
    bool used = std::any_of(results.begin(), results.end(),
                            [d](const AffineExpr &e) { return e.uses_dim(d); });
    if (used) {
      repl[d] = AffineExpr::dim(static_cast<unsigned>(a.dims.size()));
      a.dims.push_back(d);
    }
  }
  std::vector<AffineExpr> out;
  for (const AffineExpr &e : results)
    out.push_back(e.substitute(repl, symbol_ids(a.symbols)));
  a.map = AffineMap(static_cast<unsigned>(a.dims.size()), a.symbols, std::move(out));
  return a;
}

struct AppliedSet {
  IntegerSet set;
  std::vector<unsigned> dims;
};

AppliedSet compress(const IntegerSet &s) {
  AppliedSet a;
  unsigned nsyms = 0;
  for (const affine::Row &r : s.rows())
    for (unsigned k = 0; k < s.num_symbols(); ++k)
      if (r.coeffs[s.symbol_col(k)] != 0)
        nsyms = std::max(nsyms, k + 1);
  std::vector<AffineExpr> repl(s.num_vars(), AffineExpr(0));
  for (unsigned d = 0; d < s.num_dims(); ++d) {
    bool used = std::any_of(s.rows().begin(), s.rows().end(),
                            [d](const affine::Row &r) { return r.coeffs[d] != 0; });
    if (used) {
      repl[d] = AffineExpr::dim(static_cast<unsigned>(a.dims.size()));
      a.dims.push_back(d);
    }
  }
  unsigned nd = static_cast<unsigned>(a.dims.size());
  for (unsigned e = 0; e < s.num_exists(); ++e)
    repl[s.num_dims() + e] = AffineExpr::dim(nd + e);
  a.set = IntegerSet(nd, nsyms);
  a.set.append_exists(s.num_exists());
  std::vector<AffineExpr> syms = symbol_ids(s.num_symbols());
  for (const affine::AffineConstraint &c : s.constraints())
    a.set.add_constraint({c.expr.substitute(repl, syms), c.kind});
  return a;
}

std::vector<AffineExpr> shifted(const std::vector<AffineExpr> &v, Int by) {
  std::vector<AffineExpr> out;
  for (const AffineExpr &e : v)
    out.push_back(e + by);
  return out;
}

class Printer {
public:
  std::string map_name(const AffineMap &m) {
    for (const auto &[name, existing] : maps_)
      if (existing == m)
        return name;
    std::string name = "#map" + std::to_string(maps_.size());
    maps_.push_back({name, m});
    return name;
  }

  std::string set_name(const IntegerSet &s) {
    for (const auto &[name, existing] : sets_)
      if (existing == s)
        return name;
    std::string name = "#set" + std::to_string(sets_.size());
    sets_.push_back({name, s});
    return name;
  }

  void module(const Module &m) {
    symbols_.clear();
    for (const std::string &s : m.symbols)
      symbols_.push_back("%" + s);
    out_ += "affine.module @" + m.name + " symbols(";
    for (std::size_t k = 0; k < symbols_.size(); ++k)
      out_ += (k ? ", " : "") + symbols_[k];
    out_ += ") {\n";
    NameTable syms;
    syms.symbols = symbols_;
    for (const ArrayDef &a : m.arrays) {
      out_ += "  array @" + a.name + " : " + frontend::to_string(a.elem);
      for (const AffineExpr &e : a.extents)
        out_ += "[" + affine::to_string(e, syms) + "]";
      out_ += "\n";
    }
    for (const StmtDef &s : m.statements) {
      out_ += "  stmt @" + s.name + "(";
      for (std::size_t k = 0; k < s.iterators.size(); ++k)
        out_ += (k ? ", " : "") + s.iterators[k];
      out_ += ") { " + frontend::print_expr(s.body.target) + " = " +
              frontend::print_expr(s.body.value) + "; }\n";
    }
    vars_.clear();
    block(m.body, 1);
    out_ += "}\n";
  }

  std::string result() const {
    std::string head;
    for (const auto &[name, m] : maps_)
      head += name + " = " + affine::print_affine_map(m) + "\n";
    for (const auto &[name, s] : sets_)
      head += name + " = " + affine::print_integer_set(s) + "\n";
    return head + out_;
  }

  const std::vector<std::pair<std::string, AffineMap>> &maps() const { return maps_; }

private:
  std::string operands(const std::vector<unsigned> &dims, unsigned nsyms) const {
    std::string s = "(";
    for (std::size_t k = 0; k < dims.size(); ++k)
      s += (k ? ", " : "") + vars_.at(dims[k]);
    s += ")";
    if (nsyms > 0) {
      s += "[";
      for (unsigned k = 0; k < nsyms; ++k)
        s += (k ? ", " : "") + symbols_.at(k);
      s += "]";
    }
    return s;
  }

  std::string bound(const std::vector<AffineExpr> &results, unsigned depth, bool upper) {
    std::vector<AffineExpr> printed = upper ? shifted(results, 1) : results;
    if (printed.size() == 1 && printed[0].is_constant())
      return std::to_string(printed[0].constant_term());
    Applied a = compress(printed, depth);
    std::string text = printed.size() > 1 ? (upper ? "min " : "max ") : "";
    return text + map_name(a.map) + operands(a.dims, a.symbols);
  }

  void indent(unsigned level) { out_.append(2 * level, ' '); }

  NameTable names() const {
    NameTable t;
    t.dims = vars_;
    t.symbols = symbols_;
    return t;
  }

  void block(const Block &b, unsigned level) {
    for (const Op &op : b) {
      indent(level);
      if (const auto *f = std::get_if<ForOp>(&op.node)) {
        unsigned depth = static_cast<unsigned>(vars_.size());
        out_ += f->parallel ? "affine.parallel_for %" : "affine.for %";
        std::string lb = bound(f->lower, depth, false);
        std::string ub = bound(f->upper, depth, true);
        out_ += f->var + " = " + lb + " to " + ub + " {\n";
        vars_.push_back("%" + f->var);
        block(f->body, level + 1);
        vars_.pop_back();
        indent(level);
        out_ += "}\n";
      } else if (const auto *i = std::get_if<IfOp>(&op.node)) {
        AppliedSet a = compress(i->cond);
        out_ += "affine.if " + set_name(a.set) + operands(a.dims, a.set.num_symbols()) + " {\n";
        block(i->then_body, level + 1);
        indent(level);
        out_ += "}";
        if (!i->else_body.empty()) {
          out_ += " else {\n";
          block(i->else_body, level + 1);
          indent(level);
          out_ += "}";
        }
        out_ += "\n";
      } else {
        const auto &c = std::get<CallOp>(op.node);
        out_ += "call @" + c.callee + "(";
        NameTable t = names();
        for (std::size_t k = 0; k < c.operands.size(); ++k)
          out_ += (k ? ", " : "") + affine::to_string(c.operands[k], t);
        out_ += ")\n";
      }
    }
  }

  std::vector<std::pair<std::string, AffineMap>> maps_;
  std::vector<std::pair<std::string, IntegerSet>> sets_;
  std::vector<std::string> vars_;
  std::vector<std::string> symbols_;
  std::string out_;
};

} // namespace

std::vector<std::pair<std::string, AffineMap>> map_table(const std::vector<Module> &ms) {
  Printer p;
  for (const Module &m : ms)
    p.module(m);
  return p.maps();
}

std::string print_ir(const std::vector<Module> &ms) {
  Printer p;
  for (const Module &m : ms)
    p.module(m);
  return p.result();
}

std::string print_ir(const Module &m) { return print_ir(std::vector<Module>{m}); }

namespace {

class IrParser {
public:
  explicit IrParser(std::string_view text) : ts_(text) {}

  std::vector<Module> run() {
    std::vector<Module> out;
    while (!ts_.at_end()) {
      const Token &tok = ts_.peek();
      if (tok.kind == TokenKind::Ident && tok.text.starts_with("#map")) {
        std::string name = ts_.next().text;
        ts_.expect("=");
        if (!maps_.emplace(name, affine::parse_affine_map(ts_)).second)
          ts_.error_at(tok, "redefinition of " + name);
      } else if (tok.kind == TokenKind::Ident && tok.text.starts_with("#set")) {
        std::string name = ts_.next().text;
        ts_.expect("=");
        if (!sets_.emplace(name, affine::parse_integer_set(ts_)).second)
          ts_.error_at(tok, "redefinition of " + name);
      } else {
        out.push_back(module());
      }
    }
    return out;
  }

private:
  void keyword(std::string_view dialect_op) {
    // `affine.for` lexes as three tokens.
    auto dot = dialect_op.find('.');
    ts_.expect(dialect_op.substr(0, dot));
    ts_.expect(".");
    ts_.expect(dialect_op.substr(dot + 1));
  }

  bool at_keyword(std::string_view op) const {
    return ts_.is("affine") && ts_.peek(1).text == "." && ts_.peek(2).text == op;
  }

  std::string sigil_name(char sigil, std::string_view what) {
    const Token &t = ts_.expect_ident(what);
    if (t.text.size() < 2 || t.text[0] != sigil)
      ts_.error_at(t, std::string("expected ") + std::string(what) + " starting with '" + sigil +
                          "'");
    return t.text.substr(1);
  }

  Module module() {
    keyword("affine.module");
    Module m;
    m.name = sigil_name('@', "a module name");
    ts_.expect("symbols");
    ts_.expect("(");
    if (!ts_.is(")")) {
      do
        m.symbols.push_back(sigil_name('%', "a symbol"));
      while (ts_.accept(","));
    }
    ts_.expect(")");
    ts_.expect("{");
    module_ = &m;
    while (ts_.is("array"))
      array(m);
    while (ts_.is("stmt"))
      stmt(m);
    m.body = block();
    module_ = nullptr;
    return m;
  }

  std::optional<AffineExpr> resolve(std::string_view name) const {
    if (name.size() < 2 || name[0] != '%')
      return std::nullopt;
    std::string_view bare = name.substr(1);
    for (std::size_t k = vars_.size(); k-- > 0;)
      if (vars_[k] == bare)
        return AffineExpr::dim(static_cast<unsigned>(k));
    for (std::size_t k = 0; k < module_->symbols.size(); ++k)
      if (module_->symbols[k] == bare)
        return AffineExpr::symbol(static_cast<unsigned>(k));
    return std::nullopt;
  }

  AffineExpr expr() {
    return affine::parse_affine_expr(ts_, [this](std::string_view n) { return resolve(n); });
  }

  void array(Module &m) {
    ts_.expect("array");
    ArrayDef a;
    a.name = sigil_name('@', "an array name");
    ts_.expect(":");
    const Token &type = ts_.expect_ident("an element type");
    if (type.text == "int")
      a.elem = ElemKind::Int64;
    else if (type.text == "float")
      a.elem = ElemKind::Float64;
    else
      ts_.error_at(type, "unknown element type '" + type.text + "'");
    while (ts_.accept("[")) {
      a.extents.push_back(expr());
      ts_.expect("]");
    }
    m.arrays.push_back(std::move(a));
  }

  void stmt(Module &m) {
    ts_.expect("stmt");
    StmtDef s;
    s.name = sigil_name('@', "a statement name");
    ts_.expect("(");
    if (!ts_.is(")")) {
      do
        s.iterators.push_back(ts_.expect_ident("an iterator").text);
      while (ts_.accept(","));
    }
    ts_.expect(")");
    ts_.expect("{");
    frontend::Program decls;
    decls.symbols = m.symbols;
    for (const ArrayDef &a : m.arrays) {
      frontend::ArrayDecl d;
      d.name = a.name;
      d.elem = a.elem;
      d.extents.assign(a.extents.size(), frontend::Expr::integer(1));
      decls.arrays.push_back(std::move(d));
    }
    s.body = frontend::parse_assignment(ts_, decls, s.iterators);
    s.body.label = s.name;
    ts_.expect("}");
    m.statements.push_back(std::move(s));
  }

  Block block() {
    Block b;
    while (!ts_.accept("}")) {
      if (ts_.at_end())
        ts_.error("expected '}' before end of input");
      b.push_back(op());
    }
    return b;
  }

  std::vector<AffineExpr> apply_map(bool upper) {
    ts_.accept(upper ? "min" : "max");
    const Token &ref = ts_.peek();
    if (ref.kind != TokenKind::Ident || !ref.text.starts_with("#")) {
      // A single inline affine expression, e.g. `0` or `%N`.
      return {expr() - (upper ? 1 : 0)};
    }
    ts_.next();
    auto it = maps_.find(ref.text);
    if (it == maps_.end())
      throw Error(ErrorKind::UnknownReference, ref.loc, "unknown map " + ref.text);
    const AffineMap &m = it->second;
    auto [dims, syms] = operand_lists(ref, m.num_dims(), m.num_symbols(), "map " + ref.text);
    std::vector<AffineExpr> out;
    for (const AffineExpr &e : m.results())
      out.push_back(e.substitute(dims, syms) - (upper ? 1 : 0));
    return out;
  }

  std::pair<std::vector<AffineExpr>, std::vector<AffineExpr>>
  operand_lists(const Token &ref, unsigned ndims, unsigned nsyms, const std::string &what) {
    std::vector<AffineExpr> dims, syms;
    ts_.expect("(");
    if (!ts_.is(")")) {
      do
        dims.push_back(operand(false));
      while (ts_.accept(","));
    }
    ts_.expect(")");
    if (ts_.accept("[")) {
      if (!ts_.is("]")) {
        do
          syms.push_back(operand(true));
        while (ts_.accept(","));
      }
      ts_.expect("]");
    }
    if (dims.size() != ndims || syms.size() != nsyms)
      throw Error(ErrorKind::ArityMismatch, ref.loc,
                  what + " expects " + std::to_string(ndims) + " dim and " +
                      std::to_string(nsyms) + " symbol operand(s), got " +
                      std::to_string(dims.size()) + " and " + std::to_string(syms.size()));
    return {dims, syms};
  }

  AffineExpr operand(bool symbol) {
    const Token &t = ts_.expect_ident(symbol ? "a symbol operand" : "a loop variable");
    std::optional<AffineExpr> e = resolve(t.text);
    if (!e)
      throw Error(ErrorKind::UnknownReference, t.loc, "unknown operand " + t.text);
    bool is_symbol = e->uses_symbols();
    if (is_symbol != symbol)
      throw Error(ErrorKind::Syntax, t.loc,
                  t.text + (symbol ? " is not a symbol" : " is not a loop variable"));
    return *e;
  }

  Op op() {
    if (at_keyword("for") || at_keyword("parallel_for")) {
      bool parallel = ts_.peek(2).text == "parallel_for";
      keyword(parallel ? "affine.parallel_for" : "affine.for");
      ForOp f;
      f.parallel = parallel;
      f.var = sigil_name('%', "a loop variable");
      ts_.expect("=");
      f.lower = apply_map(false);
      ts_.expect("to");
      f.upper = apply_map(true);
      ts_.expect("{");
      vars_.push_back(f.var);
      f.body = block();
      vars_.pop_back();
      return Op{std::move(f)};
    }
    if (at_keyword("if")) {
      keyword("affine.if");
      const Token &ref = ts_.expect_ident("a set reference");
      auto it = sets_.find(ref.text);
      if (it == sets_.end())
        throw Error(ErrorKind::UnknownReference, ref.loc, "unknown set " + ref.text);
      const IntegerSet &s = it->second;
      auto [dims, syms] =
          operand_lists(ref, s.num_dims(), s.num_symbols(), "set " + ref.text);
      IfOp i;
      unsigned depth = static_cast<unsigned>(vars_.size());
      i.cond = IntegerSet(depth, static_cast<unsigned>(module_->symbols.size()));
      i.cond.append_exists(s.num_exists());
      std::vector<AffineExpr> repl = dims;
      for (unsigned e = 0; e < s.num_exists(); ++e)
        repl.push_back(AffineExpr::dim(depth + e));
      for (const affine::AffineConstraint &c : s.constraints())
        i.cond.add_constraint({c.expr.substitute(repl, syms), c.kind});
      ts_.expect("{");
      i.then_body = block();
      if (ts_.accept("else")) {
        ts_.expect("{");
        i.else_body = block();
      }
      return Op{std::move(i)};
    }
    if (ts_.accept("call")) {
      CallOp c;
      c.callee = sigil_name('@', "a statement name");
      ts_.expect("(");
      if (!ts_.is(")")) {
        do
          c.operands.push_back(expr());
        while (ts_.accept(","));
      }
      ts_.expect(")");
      return Op{std::move(c)};
    }
    ts_.error("expected an operation, found '" + ts_.peek().text + "'");
  }

  TokenStream ts_;
  std::map<std::string, AffineMap> maps_;
  std::map<std::string, IntegerSet> sets_;
  std::vector<std::string> vars_;
  const Module *module_ = nullptr;
};

} // namespace

std::vector<Module> parse_ir_file(std::string_view text) { return IrParser(text).run(); }

Module parse_ir(std::string_view text) {
  std::vector<Module> ms = parse_ir_file(text);
  if (ms.size() != 1)
    fail(ErrorKind::Syntax, "expected exactly one affine.module, found " + std::to_string(ms.size()));
  return std::move(ms.front());
}

namespace {

class Verifier {
public:
  explicit Verifier(const Module &m) : m_(m) {}

  std::vector<std::string> run() {
    std::set<std::string> seen;
    for (const ArrayDef &a : m_.arrays) {
      if (!seen.insert(a.name).second)
        diag("array @" + a.name, "duplicate array name");
      if (a.extents.empty())
        diag("array @" + a.name, "array has no dimensions");
      for (const AffineExpr &e : a.extents)
        if (e.dim_extent() > 0 || e.symbol_extent() > m_.symbols.size())
          diag("array @" + a.name, "extent uses a loop variable or an unknown symbol");
    }
    seen.clear();
    for (const StmtDef &s : m_.statements) {
      std::string where = "stmt @" + s.name;
      if (!seen.insert(s.name).second)
        diag(where, "duplicate statement name");
      std::set<std::string> its(s.iterators.begin(), s.iterators.end());
      if (its.size() != s.iterators.size())
        diag(where, "repeated iterator name");
      check_refs(where, s.body.target);
      check_refs(where, s.body.value);
    }
    block(m_.body);
    return std::move(diags_);
  }

private:
  void diag(const std::string &where, const std::string &what) {
    diags_.push_back(where + ": " + what);
  }

  void check_refs(const std::string &where, const frontend::Expr &e) {
    if (e.kind == frontend::ExprKind::ArrayRef) {
      const ArrayDef *a = m_.find_array(e.name);
      if (!a)
        diag(where, "reference to undeclared array @" + e.name);
      else if (a->extents.size() != e.operands.size())
        diag(where, "array @" + e.name + " indexed with the wrong number of subscripts");
    }
    for (const frontend::Expr &c : e.operands)
      check_refs(where, c);
  }

  void scope(const std::string &where, const AffineExpr &e) {
    if (e.dim_extent() > vars_.size())
      diag(where, "uses a loop variable outside its scope");
    if (e.symbol_extent() > m_.symbols.size())
      diag(where, "uses an unknown symbol");
  }

  void block(const Block &b) {
    for (const Op &op : b) {
      if (const auto *f = std::get_if<ForOp>(&op.node)) {
        std::string where = std::string(f->parallel ? "affine.parallel_for" : "affine.for") +
                            " %" + f->var;
        if (f->var.empty())
          diag(where, "loop variable has no name");
        if (std::find(vars_.begin(), vars_.end(), f->var) != vars_.end())
          diag(where, "loop variable shadows an enclosing loop variable");
        if (std::find(m_.symbols.begin(), m_.symbols.end(), f->var) != m_.symbols.end())
          diag(where, "loop variable shadows a symbol");
        if (f->lower.empty())
          diag(where, "lower bound has no results");
        if (f->upper.empty())
          diag(where, "upper bound has no results");
        for (const AffineExpr &e : f->lower)
          scope(where + " lower bound", e);
        for (const AffineExpr &e : f->upper)
          scope(where + " upper bound", e);
        vars_.push_back(f->var);
        block(f->body);
        vars_.pop_back();
      } else if (const auto *i = std::get_if<IfOp>(&op.node)) {
        if (i->cond.num_dims() != vars_.size())
          diag("affine.if", "condition has " + std::to_string(i->cond.num_dims()) +
                                " dims but " + std::to_string(vars_.size()) +
                                " loop variables are in scope");
        if (i->cond.num_symbols() > m_.symbols.size())
          diag("affine.if", "condition uses an unknown symbol");
        block(i->then_body);
        block(i->else_body);
      } else {
        const auto &c = std::get<CallOp>(op.node);
        std::string where = "call @" + c.callee;
        const StmtDef *s = m_.find_statement(c.callee);
        if (!s)
          diag(where, "call to undefined statement");
        else if (s->iterators.size() != c.operands.size())
          diag(where, "arity mismatch: statement takes " + std::to_string(s->iterators.size()) +
                          " operand(s), call passes " + std::to_string(c.operands.size()));
        for (const AffineExpr &e : c.operands)
          scope(where + " operand", e);
      }
    }
  }

  const Module &m_;
  std::vector<std::string> vars_;
  std::vector<std::string> diags_;
};

} // namespace

std::vector<std::string> verify_ir(const Module &m) { return Verifier(m).run(); }

void verify_or_throw(const Module &m) {
  std::vector<std::string> d = verify_ir(m);
  if (d.empty())
    return;
  std::string msg = "invalid affine module @" + m.name + ":";
  for (const std::string &line : d)
    msg += "\n  " + line;
  fail(ErrorKind::Malformed, msg);
}

} // namespace polyhls::ir
