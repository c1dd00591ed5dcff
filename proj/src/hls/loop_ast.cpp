//===- loop_ast.cpp - Lowering affine IR to explicit loops ------------------===//

#include "polyhls/hls/loop_ast.hpp"

#include <algorithm>
#include <numeric>

namespace polyhls::hls {

using affine::AffineExpr;
using affine::IntegerSet;
using affine::Row;
using affine::TermKind;

IExpr IExpr::constant(Int v) {
  IExpr e;
  e.value = v;
  return e;
}

IExpr IExpr::var(std::string name) {
  IExpr e;
  e.kind = IExprKind::Var;
  e.name = std::move(name);
  return e;
}

IExpr IExpr::binary(IExprKind kind, IExpr a, IExpr b) {
  IExpr e;
  e.kind = kind;
  e.operands.push_back(std::move(a));
  e.operands.push_back(std::move(b));
  return e;
}

IExpr IExpr::nary(IExprKind kind, std::vector<IExpr> ops) {
  if (ops.size() == 1)
    return std::move(ops.front());
  bool all_const = std::all_of(ops.begin(), ops.end(), [](const IExpr &o) { return o.is_const(); });
  if (all_const && !ops.empty()) {
    Int v = ops.front().value;
    for (const IExpr &o : ops)
      v = kind == IExprKind::Max ? std::max(v, o.value) : std::min(v, o.value);
    return constant(v);
  }
  IExpr e;
  e.kind = kind;
  e.operands = std::move(ops);
  return e;
}

bool operator==(const LFor &a, const LFor &b) {
  return a.var == b.var && a.lower == b.lower && a.upper == b.upper &&
         a.parallel == b.parallel && a.pipeline == b.pipeline && a.unroll == b.unroll &&
         a.body == b.body;
}
bool operator==(const LIf &a, const LIf &b) {
  return a.conds == b.conds && a.then_body == b.then_body && a.else_body == b.else_body;
}
bool operator==(const LCall &a, const LCall &b) {
  return a.callee == b.callee && a.args == b.args;
}
bool operator==(const LStmt &a, const LStmt &b) { return a.node == b.node; }

const ir::StmtDef *LoopProgram::find_statement(std::string_view name) const {
  for (const ir::StmtDef &s : statements)
    if (s.name == name)
      return &s;
  return nullptr;
}

//===----------------------------------------------------------------------===//
// Expressions
//===----------------------------------------------------------------------===//

IExpr lower_expr(const AffineExpr &e, const std::vector<std::string> &dims,
                 const std::vector<std::string> &syms) {
  std::vector<std::pair<Int, IExpr>> parts;
  for (const auto &[t, c] : e.terms()) {
    IExpr x;
    switch (t.kind) {
    case TermKind::Dim:
      if (t.index >= dims.size())
        fail(ErrorKind::Internal, "dim d" + std::to_string(t.index) + " has no name");
      x = IExpr::var(dims[t.index]);
      break;
    case TermKind::Symbol:
      if (t.index >= syms.size())
        fail(ErrorKind::Internal, "symbol s" + std::to_string(t.index) + " has no name");
      x = IExpr::var(syms[t.index]);
      break;
    case TermKind::FloorDiv:
    case TermKind::CeilDiv:
    case TermKind::Mod: {
      IExprKind k = t.kind == TermKind::FloorDiv  ? IExprKind::FloorDiv
                    : t.kind == TermKind::CeilDiv ? IExprKind::CeilDiv
                                                  : IExprKind::Mod;
      x = IExpr::binary(k, lower_expr(t.operand(), dims, syms), IExpr::constant(t.divisor));
      break;
    }
    }
    parts.emplace_back(c, std::move(x));
  }
  std::stable_partition(parts.begin(), parts.end(), [](const auto &p) { return p.first > 0; });

  auto scaled = [](Int c, IExpr x) {
    return c == 1 ? x : IExpr::binary(IExprKind::Mul, IExpr::constant(c), std::move(x));
  };
  std::optional<IExpr> acc;
  for (auto &[c, x] : parts) {
    if (!acc)
      acc = scaled(c, std::move(x));
    else if (c > 0)
      acc = IExpr::binary(IExprKind::Add, std::move(*acc), scaled(c, std::move(x)));
    else
      acc = IExpr::binary(IExprKind::Sub, std::move(*acc), scaled(checked::neg(c), std::move(x)));
  }
  Int k = e.constant_term();
  if (!acc)
    return IExpr::constant(k);
  if (k > 0)
    return IExpr::binary(IExprKind::Add, std::move(*acc), IExpr::constant(k));
  if (k < 0)
    return IExpr::binary(IExprKind::Sub, std::move(*acc), IExpr::constant(checked::neg(k)));
  return *acc;
}

namespace {

struct CondLowering {
  unsigned nd, ne, ns;
  const std::vector<std::string> &dims;
  const std::vector<std::string> &syms;
  std::vector<Row> rows;
  std::vector<LCond> extra;
  bool infeasible = false;

  unsigned ecol(unsigned x) const { return nd + x; }

  bool uses_exists(const Row &r, unsigned skip) const {
    for (unsigned x = 0; x < ne; ++x)
      if (x != skip && r.coeffs[ecol(x)] != 0)
        return true;
    return false;
  }

  // Row without its existential columns (all of which must be zero).
  AffineExpr row_expr(const Row &r) const {
    AffineExpr e(r.coeffs.back());
    for (unsigned d = 0; d < nd; ++d)
      if (r.coeffs[d] != 0)
        e += AffineExpr::dim(d) * r.coeffs[d];
    for (unsigned s = 0; s < ns; ++s)
      if (r.coeffs[nd + ne + s] != 0)
        e += AffineExpr::symbol(s) * r.coeffs[nd + ne + s];
    return e;
  }

  IExpr lower(const Row &r) const { return lower_expr(row_expr(r), dims, syms); }

  void push(Row r) {
    switch (affine::normalize_row(r)) {
    case affine::RowStatus::Trivial:
      return;
    case affine::RowStatus::Infeasible:
      infeasible = true;
      return;
    case affine::RowStatus::Keep:
      rows.push_back(std::move(r));
    }
  }

  static Row combine(Int a, const Row &r, Int b, const Row &s, bool equality) {
    Row out;
    out.equality = equality;
    out.coeffs.resize(r.coeffs.size());
    for (std::size_t k = 0; k < r.coeffs.size(); ++k)
      out.coeffs[k] = checked::add(checked::mul(a, r.coeffs[k]), checked::mul(b, s.coeffs[k]));
    return out;
  }

  // Uses equality `pivot` (coefficient c on x) to remove x from every row.
  void substitute(std::size_t pivot, unsigned x) {
    Row eq = rows[pivot];
    rows.erase(rows.begin() + static_cast<std::ptrdiff_t>(pivot));
    Int c = eq.coeffs[ecol(x)];
    Int ac = checked::abs(c);
    if (ac != 1) {
      Row rest = eq;
      rest.coeffs[ecol(x)] = 0;
      extra.push_back({IExpr::binary(IExprKind::Mod, lower(rest), IExpr::constant(ac)), true});
    }
    std::vector<Row> old = std::move(rows);
    rows.clear();
    for (Row &r : old) {
      Int a = r.coeffs[ecol(x)];
      if (a == 0) {
        push(std::move(r));
        continue;
      }
      push(combine(ac, r, c > 0 ? -a : a, eq, r.equality));
    }
  }

  bool eliminate_by_equality() {
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t k = 0; k < rows.size(); ++k) {
        if (!rows[k].equality)
          continue;
        for (unsigned x = 0; x < ne; ++x) {
          Int c = rows[k].coeffs[ecol(x)];
          if (c == 0)
            continue;
          // Unit pivots substitute exactly; others need the remainder free
          // of further existentials to state the divisibility condition.
          if ((pass == 0 && checked::abs(c) == 1) || (pass == 1 && !uses_exists(rows[k], x))) {
            substitute(k, x);
            return true;
          }
        }
      }
    return false;
  }

  // x occurs only in inequalities that mention no other existential:
  // some integer lies between the largest lower and smallest upper bound.
  bool eliminate_by_bounds() {
    for (unsigned x = 0; x < ne; ++x) {
      std::vector<Row> lo, hi, rest;
      bool ok = true, used = false;
      for (const Row &r : rows) {
        Int a = r.coeffs[ecol(x)];
        if (a == 0) {
          rest.push_back(r);
          continue;
        }
        used = true;
        if (r.equality || uses_exists(r, x)) {
          ok = false;
          break;
        }
        (a > 0 ? lo : hi).push_back(r);
      }
      if (!ok || !used)
        continue;
      rows = std::move(rest);
      for (const Row &l : lo)
        for (const Row &h : hi) {
          Int a = l.coeffs[ecol(x)];
          Int b = checked::neg(h.coeffs[ecol(x)]);
          if (a == 1 || b == 1) {
            push(combine(b, l, a, h, false));
            continue;
          }
          Row rl = l, rh = h;
          rl.coeffs[ecol(x)] = 0;
          rh.coeffs[ecol(x)] = 0;
          // a*x + rl >= 0 and rh - b*x >= 0.
          IExpr low = IExpr::binary(IExprKind::CeilDiv,
                                    lower_expr(-row_expr(rl), dims, syms), IExpr::constant(a));
          IExpr high = IExpr::binary(IExprKind::FloorDiv, lower(rh), IExpr::constant(b));
          extra.push_back({IExpr::binary(IExprKind::Sub, std::move(high), std::move(low)), false});
        }
      return true;
    }
    return false;
  }

  bool has_exists() const {
    return std::any_of(rows.begin(), rows.end(), [&](const Row &r) { return uses_exists(r, ne); });
  }

  std::vector<LCond> run(const IntegerSet &cond) {
    for (const Row &r : cond.rows())
      push(r);
    while (!infeasible && has_exists()) {
      if (eliminate_by_equality() || eliminate_by_bounds())
        continue;
      fail(ErrorKind::Unsupported,
           "condition couples several existential variables; no exact lowering");
    }
    if (infeasible)
      return {{IExpr::constant(-1), false}};
    std::vector<LCond> out;
    for (const Row &r : rows)
      out.push_back({lower(r), r.equality});
    for (LCond &c : extra)
      out.push_back(std::move(c));
    return out;
  }
};

} // namespace

std::vector<LCond> lower_condition(const IntegerSet &cond, const std::vector<std::string> &dims,
                                   const std::vector<std::string> &syms) {
  CondLowering l{cond.num_dims(), cond.num_exists(), cond.num_symbols(), dims, syms, {}, {}};
  return l.run(cond);
}

//===----------------------------------------------------------------------===//
// Lowering
//===----------------------------------------------------------------------===//

namespace {

struct Lowerer {
  const ir::Module &m;
  std::vector<std::string> loops;

  IExpr expr(const AffineExpr &e) { return lower_expr(e, loops, m.symbols); }

  IExpr bound(const std::vector<AffineExpr> &results, IExprKind kind) {
    std::vector<IExpr> ops;
    for (const AffineExpr &r : results)
      ops.push_back(expr(r));
    if (ops.empty())
      fail(ErrorKind::Malformed, "loop bound has no results");
    return IExpr::nary(kind, std::move(ops));
  }

  LBlock block(const ir::Block &b) {
    LBlock out;
    for (const ir::Op &op : b) {
      if (const auto *f = std::get_if<ir::ForOp>(&op.node)) {
        LFor l;
        l.var = f->var;
        l.lower = bound(f->lower, IExprKind::Max);
        l.upper = bound(f->upper, IExprKind::Min);
        l.parallel = f->parallel;
        loops.push_back(f->var);
        l.body = block(f->body);
        loops.pop_back();
        out.push_back({std::move(l)});
      } else if (const auto *i = std::get_if<ir::IfOp>(&op.node)) {
        LIf l;
        l.conds = lower_condition(i->cond, loops, m.symbols);
        l.then_body = block(i->then_body);
        l.else_body = block(i->else_body);
        out.push_back({std::move(l)});
      } else {
        const auto &c = std::get<ir::CallOp>(op.node);
        LCall l;
        l.callee = c.callee;
        for (const AffineExpr &a : c.operands)
          l.args.push_back(expr(a));
        out.push_back({std::move(l)});
      }
    }
    return out;
  }
};

} // namespace

LoopProgram lower_to_standard(const ir::Module &m) {
  LoopProgram p;
  p.name = m.name;
  p.symbols = m.symbols;
  for (const ir::ArrayDef &a : m.arrays) {
    LArray l{a.name, a.elem, {}};
    for (const AffineExpr &e : a.extents)
      l.extents.push_back(lower_expr(e, {}, m.symbols));
    p.arrays.push_back(std::move(l));
  }
  p.statements = m.statements;
  Lowerer l{m, {}};
  p.body = l.block(m.body);
  return p;
}

//===----------------------------------------------------------------------===//
// Evaluation and printing
//===----------------------------------------------------------------------===//

Int evaluate(const IExpr &e, const std::vector<std::pair<std::string, Int>> &env) {
  auto arg = [&](std::size_t k) { return evaluate(e.operands[k], env); };
  switch (e.kind) {
  case IExprKind::Const:
    return e.value;
  case IExprKind::Var:
    for (auto it = env.rbegin(); it != env.rend(); ++it)
      if (it->first == e.name)
        return it->second;
    fail(ErrorKind::Execution, "unbound variable " + e.name);
  case IExprKind::Add:
    return checked::add(arg(0), arg(1));
  case IExprKind::Sub:
    return checked::sub(arg(0), arg(1));
  case IExprKind::Mul:
    return checked::mul(arg(0), arg(1));
  case IExprKind::FloorDiv:
    return checked::floor_div(arg(0), arg(1));
  case IExprKind::CeilDiv:
    return checked::ceil_div(arg(0), arg(1));
  case IExprKind::Mod:
    return checked::mod(arg(0), arg(1));
  case IExprKind::Max:
  case IExprKind::Min: {
    Int v = arg(0);
    for (std::size_t k = 1; k < e.operands.size(); ++k)
      v = e.kind == IExprKind::Max ? std::max(v, arg(k)) : std::min(v, arg(k));
    return v;
  }
  }
  fail(ErrorKind::Internal, "bad expression kind");
}

namespace {

struct Spelling {
  const char *floordiv, *ceildiv, *mod, *max, *min;
  bool binary_minmax;
  bool c_literals;
};

constexpr Spelling kStd{"floordiv", "ceildiv", "mod", "max", "min", false, false};
constexpr Spelling kC{"floord", "ceild", "floormod", "max", "min", true, true};

std::string print(const IExpr &e, int prec, const Spelling &sp) {
  auto wrap = [&](int own, std::string s) { return own < prec ? "(" + s + ")" : s; };
  auto call = [&](const char *fn, const std::vector<IExpr> &ops) {
    std::string s = std::string(fn) + "(";
    for (std::size_t k = 0; k < ops.size(); ++k)
      s += (k ? ", " : "") + print(ops[k], 0, sp);
    return s + ")";
  };
  switch (e.kind) {
  case IExprKind::Const: {
    std::string s = std::to_string(e.value);
    if (sp.c_literals && (e.value > 2147483647 || e.value < -2147483647))
      s += "LL";
    return e.value < 0 ? wrap(1, s) : s;
  }
  case IExprKind::Var:
    return e.name;
  case IExprKind::Add:
    return wrap(1, print(e.operands[0], 1, sp) + "+" + print(e.operands[1], 2, sp));
  case IExprKind::Sub:
    return wrap(1, print(e.operands[0], 1, sp) + "-" + print(e.operands[1], 2, sp));
  case IExprKind::Mul:
    if (e.operands[0].is_const() && e.operands[0].value == -1)
      return wrap(1, "-" + print(e.operands[1], 3, sp));
    return wrap(2, print(e.operands[0], 2, sp) + "*" + print(e.operands[1], 3, sp));
  case IExprKind::FloorDiv:
    return call(sp.floordiv, e.operands);
  case IExprKind::CeilDiv:
    return call(sp.ceildiv, e.operands);
  case IExprKind::Mod:
    return call(sp.mod, e.operands);
  case IExprKind::Max:
  case IExprKind::Min: {
    const char *fn = e.kind == IExprKind::Max ? sp.max : sp.min;
    if (!sp.binary_minmax || e.operands.size() <= 2)
      return call(fn, e.operands);
    // max(a, max(b, c)) for C.
    IExpr tail = e;
    tail.operands.erase(tail.operands.begin());
    return std::string(fn) + "(" + print(e.operands[0], 0, sp) + ", " + print(tail, 0, sp) + ")";
  }
  }
  return "?";
}

} // namespace

std::string to_string(const IExpr &e) { return print(e, 0, kStd); }

std::string to_c(const IExpr &e) { return print(e, 0, kC); }

namespace {

struct LoopPrinter {
  std::string out;

  void line(int indent, const std::string &s) {
    out.append(static_cast<std::size_t>(indent) * 2, ' ');
    out += s;
    out += '\n';
  }

  static std::string conds(const std::vector<LCond> &cs) {
    if (cs.empty())
      return "true";
    std::string s;
    for (std::size_t k = 0; k < cs.size(); ++k)
      s += (k ? " && " : "") + to_string(cs[k].expr) + (cs[k].equality ? " == 0" : " >= 0");
    return s;
  }

  void block(const LBlock &b, int indent) {
    for (const LStmt &st : b) {
      if (const auto *f = std::get_if<LFor>(&st.node)) {
        if (f->pipeline)
          line(indent, "#pipeline");
        if (f->unroll)
          line(indent, "#unroll " + std::to_string(*f->unroll));
        line(indent, std::string(f->parallel ? "parallel " : "") + "for " + f->var + " = " +
                         to_string(f->lower) + " to " + to_string(f->upper) + " {");
        block(f->body, indent + 1);
        line(indent, "}");
      } else if (const auto *i = std::get_if<LIf>(&st.node)) {
        line(indent, "if (" + conds(i->conds) + ") {");
        block(i->then_body, indent + 1);
        if (!i->else_body.empty()) {
          line(indent, "} else {");
          block(i->else_body, indent + 1);
        }
        line(indent, "}");
      } else {
        const auto &c = std::get<LCall>(st.node);
        std::string s = c.callee + "(";
        for (std::size_t k = 0; k < c.args.size(); ++k)
          s += (k ? ", " : "") + to_string(c.args[k]);
        line(indent, s + ");");
      }
    }
  }

  void program(const LoopProgram &p) {
    std::string head = "std.module @" + p.name + " symbols(";
    for (std::size_t k = 0; k < p.symbols.size(); ++k)
      head += (k ? ", " : "") + p.symbols[k];
    line(0, head + ") {");
    for (const LArray &a : p.arrays) {
      std::string s = "array " + a.name + " : " + frontend::to_string(a.elem);
      for (const IExpr &e : a.extents)
        s += "[" + to_string(e) + "]";
      line(1, s);
    }
    for (const ir::StmtDef &s : p.statements) {
      std::string h = "stmt " + s.name + "(";
      for (std::size_t k = 0; k < s.iterators.size(); ++k)
        h += (k ? ", " : "") + s.iterators[k];
      line(1, h + ") { " + frontend::print_expr(s.body.target) + " = " +
                  frontend::print_expr(s.body.value) + "; }");
    }
    block(p.body, 1);
    line(0, "}");
  }
};

} // namespace

std::string print_loops(const LoopProgram &p) {
  LoopPrinter lp;
  lp.program(p);
  return lp.out;
}

std::string print_loops(const std::vector<LoopProgram> &ps) {
  LoopPrinter lp;
  for (const LoopProgram &p : ps)
    lp.program(p);
  return lp.out;
}

} // namespace polyhls::hls
