//===- scop.cpp - SCoP extraction and original schedules ------------------===//

#include "polyhls/scop/scop.hpp"
#include "polyhls/affine/text.hpp"

#include <algorithm>

namespace polyhls::scop {

using affine::AffineConstraint;
using affine::AffineExpr;
using affine::AffineMap;
using affine::ConstraintKind;
using affine::IntegerSet;
using frontend::CmpOp;
using frontend::Expr;
using frontend::ExprKind;

const ArrayInfo *Scop::find_array(std::string_view name) const {
  for (const ArrayInfo &a : arrays)
    if (a.name == name)
      return &a;
  return nullptr;
}

const PolyStmt *Scop::find_statement(std::string_view name) const {
  for (const PolyStmt &s : statements)
    if (s.name == name)
      return &s;
  return nullptr;
}

std::vector<Int> Scop::array_shape(const ArrayInfo &a, std::span<const Int> syms) const {
  std::vector<Int> shape;
  for (const AffineExpr &e : a.extents) {
    Int v = e.evaluate({}, syms);
    if (v < 0)
      fail(ErrorKind::Execution,
           "array " + a.name + " has negative extent " + std::to_string(v));
    shape.push_back(v);
  }
  return shape;
}

AffineExpr to_affine(const Expr &e, const std::vector<std::string> &dims,
                     const std::vector<std::string> &symbols) {
  auto non_affine = [&]() -> AffineExpr {
    throw Error(ErrorKind::NonAffine, e.loc,
                "non-affine expression '" + frontend::print_expr(e) + "'");
  };
  switch (e.kind) {
  case ExprKind::IntLit:
    return AffineExpr(e.int_value);
  case ExprKind::Var: {
    for (std::size_t k = dims.size(); k-- > 0;)
      if (dims[k] == e.name)
        return AffineExpr::dim(static_cast<unsigned>(k));
    for (std::size_t k = 0; k < symbols.size(); ++k)
      if (symbols[k] == e.name)
        return AffineExpr::symbol(static_cast<unsigned>(k));
    throw Error(ErrorKind::UnknownReference, e.loc, "unknown identifier '" + e.name + "'");
  }
  case ExprKind::Neg:
    return -to_affine(e.operands[0], dims, symbols);
  case ExprKind::Add:
    return to_affine(e.operands[0], dims, symbols) + to_affine(e.operands[1], dims, symbols);
  case ExprKind::Sub:
    return to_affine(e.operands[0], dims, symbols) - to_affine(e.operands[1], dims, symbols);
  case ExprKind::Mul: {
    AffineExpr a = to_affine(e.operands[0], dims, symbols);
    AffineExpr b = to_affine(e.operands[1], dims, symbols);
    if (a.is_constant())
      return b * a.constant_term();
    if (b.is_constant())
      return a * b.constant_term();
    return non_affine();
  }
  default:
    return non_affine();
  }
}

IntegerSet parse_assumption(std::string_view text, const std::vector<std::string> &symbols) {
  TokenStream ts(text);
  affine::IdentResolver resolve = [&](std::string_view n) -> std::optional<AffineExpr> {
    for (std::size_t k = 0; k < symbols.size(); ++k)
      if (symbols[k] == n)
        return AffineExpr::symbol(static_cast<unsigned>(k));
    return std::nullopt;
  };
  IntegerSet set(0, static_cast<unsigned>(symbols.size()));
  try {
    AffineExpr lhs = affine::parse_affine_expr(ts, resolve);
    const Token &op = ts.next();
    AffineExpr rhs = affine::parse_affine_expr(ts, resolve);
    if (!ts.at_end())
      ts.error("trailing input in assumption");
    if (op.text == ">=")
      set.add_inequality(lhs - rhs);
    else if (op.text == "<=")
      set.add_inequality(rhs - lhs);
    else if (op.text == ">")
      set.add_inequality(lhs - rhs - 1);
    else if (op.text == "<")
      set.add_inequality(rhs - lhs - 1);
    else if (op.text == "==")
      set.add_equality(lhs - rhs);
    else
      ts.error_at(op, "expected a comparison in assumption");
  } catch (const Error &e) {
    throw Error(ErrorKind::InvalidArgument,
                "invalid assumption '" + std::string(text) + "': " + e.what());
  }
  return set;
}

namespace {

void collect_reads(const Expr &e, std::vector<const Expr *> &out) {
  if (e.kind == ExprKind::ArrayRef) {
    out.push_back(&e);
    return;
  }
  for (const Expr &c : e.operands)
    collect_reads(c, out);
}

class Builder {
public:
  Builder(const frontend::Program &p, Scop &scop) : prog_(p), scop_(scop) {}

  void walk(const std::vector<frontend::Stmt> &stmts) {
    for (const frontend::Stmt &s : stmts) {
      if (const auto *f = std::get_if<frontend::ForStmt>(&s.node)) {
        Int pos = counters_.back()++;
        AffineExpr lb = to_affine(f->lower, loops_, scop_.symbols);
        AffineExpr ub = to_affine(f->upper, loops_, scop_.symbols);
        if (!f->inclusive)
          ub = ub - 1;
        AffineExpr iv = AffineExpr::dim(static_cast<unsigned>(loops_.size()));
        cons_.push_back({iv - lb, ConstraintKind::Inequality});
        cons_.push_back({ub - iv, ConstraintKind::Inequality});
        loops_.push_back(f->var);
        beta_.push_back(pos);
        counters_.push_back(0);
        walk(f->body);
        counters_.pop_back();
        beta_.pop_back();
        loops_.pop_back();
        cons_.resize(cons_.size() - 2);
      } else if (const auto *i = std::get_if<frontend::IfStmt>(&s.node)) {
        std::size_t mark = cons_.size();
        for (const frontend::Condition &c : i->conds)
          cons_.push_back(condition(c, false));
        walk(i->then_body);
        cons_.resize(mark);
        if (!i->else_body.empty()) {
          if (i->conds.size() != 1)
            throw Error(ErrorKind::Unsupported, s.loc,
                        "'else' of a compound condition (its domain is not convex)");
          cons_.push_back(condition(i->conds[0], true));
          walk(i->else_body);
          cons_.resize(mark);
        }
      } else if (const auto *a = std::get_if<frontend::AssignStmt>(&s.node)) {
        statement(*a, counters_.back()++);
      }
    }
  }

private:
  AffineConstraint condition(const frontend::Condition &c, bool negate) {
    AffineExpr l = to_affine(c.lhs, loops_, scop_.symbols);
    AffineExpr r = to_affine(c.rhs, loops_, scop_.symbols);
    CmpOp op = c.op;
    if (negate) {
      switch (op) {
      case CmpOp::Lt:
        op = CmpOp::Ge;
        break;
      case CmpOp::Le:
        op = CmpOp::Gt;
        break;
      case CmpOp::Gt:
        op = CmpOp::Le;
        break;
      case CmpOp::Ge:
        op = CmpOp::Lt;
        break;
      case CmpOp::Eq:
        throw Error(ErrorKind::Unsupported, c.lhs.loc,
                    "'else' of an equality test");
      }
    }
    switch (op) {
    case CmpOp::Lt:
      return {r - l - 1, ConstraintKind::Inequality};
    case CmpOp::Le:
      return {r - l, ConstraintKind::Inequality};
    case CmpOp::Gt:
      return {l - r - 1, ConstraintKind::Inequality};
    case CmpOp::Ge:
      return {l - r, ConstraintKind::Inequality};
    case CmpOp::Eq:
      break;
    }
    return {l - r, ConstraintKind::Equality};
  }

  Access access(const Expr &ref) {
    std::vector<AffineExpr> subs;
    for (const Expr &s : ref.operands)
      subs.push_back(to_affine(s, loops_, scop_.symbols));
    use_array(ref.name);
    return {ref.name, AffineMap(static_cast<unsigned>(loops_.size()),
                                static_cast<unsigned>(scop_.symbols.size()), std::move(subs))};
  }

  void use_array(const std::string &name) {
    if (scop_.find_array(name))
      return;
    const frontend::ArrayDecl *decl = prog_.find_array(name);
    if (!decl)
      fail(ErrorKind::UnknownReference, "undeclared array '" + name + "'");
    ArrayInfo info;
    info.name = name;
    info.elem = decl->elem;
    for (const Expr &e : decl->extents)
      info.extents.push_back(to_affine(e, {}, scop_.symbols));
    // Keep declaration order.
    auto pos = std::find_if(scop_.arrays.begin(), scop_.arrays.end(), [&](const ArrayInfo &a) {
      return prog_.find_array(a.name) > decl;
    });
    scop_.arrays.insert(pos, std::move(info));
  }

  void statement(const frontend::AssignStmt &a, Int pos) {
    PolyStmt st;
    st.name = a.label;
    st.depth = static_cast<unsigned>(loops_.size());
    st.dim_names = loops_;
    st.beta = beta_;
    st.beta.push_back(pos);
    unsigned nsyms = static_cast<unsigned>(scop_.symbols.size());
    st.domain = IntegerSet(st.depth, nsyms);
    for (const AffineConstraint &c : cons_)
      st.domain.add_constraint(c);
    st.guard = IntegerSet::universe(st.depth, nsyms);
    st.writes.push_back(access(a.target));
    std::vector<const Expr *> refs;
    collect_reads(a.value, refs);
    for (const Expr *r : refs) {
      Access acc = access(*r);
      if (std::find(st.reads.begin(), st.reads.end(), acc) == st.reads.end())
        st.reads.push_back(std::move(acc));
    }
    st.body = a;
    scop_.statements.push_back(std::move(st));
  }

  const frontend::Program &prog_;
  Scop &scop_;
  std::vector<std::string> loops_;
  std::vector<AffineConstraint> cons_;
  std::vector<Int> beta_;
  std::vector<Int> counters_{0};
};

} // namespace

std::vector<Scop> extract_scops(const frontend::Program &p, const ExtractOptions &opts) {
  unsigned nsyms = static_cast<unsigned>(p.symbols.size());
  IntegerSet context(0, nsyms);
  std::vector<bool> overridden(nsyms, false);
  std::vector<IntegerSet> assumed;
  for (const std::string &text : opts.assumptions) {
    IntegerSet a = parse_assumption(text, p.symbols);
    for (const affine::Row &r : a.rows())
      for (unsigned s = 0; s < nsyms; ++s)
        if (r.coeffs[a.symbol_col(s)] != 0)
          overridden[s] = true;
    assumed.push_back(std::move(a));
  }
  for (unsigned s = 0; s < nsyms; ++s)
    if (!overridden[s])
      context.add_inequality(AffineExpr::symbol(s) - 1);
  for (const IntegerSet &a : assumed)
    context = context.intersect(a);

  std::vector<Scop> out;
  std::vector<frontend::Stmt> region;
  bool inside = false;
  for (const frontend::Stmt &s : p.body) {
    if (const auto *m = std::get_if<frontend::ScopMarker>(&s.node)) {
      if (m->begin) {
        inside = true;
        region.clear();
        continue;
      }
      inside = false;
      Scop scop;
      scop.name = "scop" + std::to_string(out.size());
      scop.symbols = p.symbols;
      scop.context = context;
      Builder(p, scop).walk(region);
      out.push_back(std::move(scop));
      continue;
    }
    if (inside)
      region.push_back(s);
  }
  return out;
}

Scop original_schedule(Scop scop) {
  unsigned max_depth = 0;
  for (const PolyStmt &s : scop.statements)
    max_depth = std::max(max_depth, s.depth);
  unsigned width = 2 * max_depth + 1;
  for (PolyStmt &s : scop.statements) {
    std::vector<AffineExpr> results;
    for (unsigned k = 0; k < s.depth; ++k) {
      results.push_back(s.beta[k]);
      results.push_back(AffineExpr::dim(k));
    }
    results.push_back(s.beta[s.depth]);
    while (results.size() < width)
      results.push_back(0);
    s.schedule = AffineMap(s.num_dims(), s.domain.num_symbols(), std::move(results));
  }
  scop.parallel.assign(width, false);
  scop.bands.clear();
  return scop;
}

std::vector<Scop> build_scops(const frontend::Program &p, const ExtractOptions &opts) {
  std::vector<Scop> scops = extract_scops(p, opts);
  for (Scop &s : scops)
    s = original_schedule(std::move(s));
  return scops;
}

std::string dump_scop(const Scop &scop) {
  std::string out = "scop " + scop.name + "\n";
  out += "  symbols (";
  for (std::size_t i = 0; i < scop.symbols.size(); ++i)
    out += (i ? ", " : "") + scop.symbols[i];
  out += ")\n  context " + affine::print_integer_set(scop.context) + "\n";
  for (const ArrayInfo &a : scop.arrays) {
    out += "  array " + a.name + " : " + frontend::to_string(a.elem);
    affine::NameTable names;
    names.symbols = scop.symbols;
    for (const AffineExpr &e : a.extents)
      out += "[" + affine::to_string(e, names) + "]";
    out += "\n";
  }
  for (const PolyStmt &s : scop.statements) {
    out += "  stmt " + s.name + " (";
    for (unsigned k = 0; k < s.num_dims(); ++k) {
      const std::string &n = s.dim_names[k];
      out += (k ? ", " : "") + (n.empty() ? "<d" + std::to_string(k) + ">" : n);
    }
    out += ")\n";
    out += "    domain " + affine::print_integer_set(s.domain) + "\n";
    if (!s.guard.rows().empty())
      out += "    guard " + affine::print_integer_set(s.guard) + "\n";
    out += "    schedule " + affine::print_affine_map(s.schedule) + "\n";
    for (const Access &w : s.writes)
      out += "    write " + w.array + " " + affine::print_affine_map(w.map) + "\n";
    for (const Access &r : s.reads)
      out += "    read " + r.array + " " + affine::print_affine_map(r.map) + "\n";
  }
  out += "  parallel (";
  bool first = true;
  for (std::size_t k = 0; k < scop.parallel.size(); ++k) {
    if (!scop.parallel[k])
      continue;
    out += (first ? "" : ", ") + std::to_string(k);
    first = false;
  }
  out += ")\n";
  for (const TileBand &b : scop.bands) {
    out += b.bounding_box ? "  bbox-band" : "  band";
    out += " tiles (";
    for (std::size_t k = 0; k < b.tile_positions.size(); ++k)
      out += (k ? ", " : "") + std::to_string(b.tile_positions[k]);
    out += ") points (";
    for (std::size_t k = 0; k < b.point_positions.size(); ++k)
      out += (k ? ", " : "") + std::to_string(b.point_positions[k]);
    out += ") sizes (";
    for (std::size_t k = 0; k < b.sizes.size(); ++k)
      out += (k ? ", " : "") + std::to_string(b.sizes[k]);
    out += ")\n";
  }
  return out;
}

} // namespace polyhls::scop
