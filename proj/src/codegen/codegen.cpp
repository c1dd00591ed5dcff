//===- codegen.cpp - Scanning scheduled polyhedra into loops --------------===//

#include "polyhls/codegen/codegen.hpp"
#include "polyhls/affine/fm.hpp"
#include "polyhls/affine/text.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>

namespace polyhls::codegen {

using namespace affine;
using ir::Block;
using ir::CallOp;
using ir::ForOp;
using ir::IfOp;
using ir::Op;

namespace {

std::vector<AffineExpr> symbol_ids(unsigned n) {
  std::vector<AffineExpr> v;
  for (unsigned k = 0; k < n; ++k)
    v.push_back(AffineExpr::symbol(k));
  return v;
}

/// What is known to hold inside the current loop nest: the context and the
/// bounds of every enclosing loop. Dims are the loop variables.
class Facts {
public:
  Facts(const IntegerSet &context, unsigned nsyms) : set_(0, nsyms) {
    for (const AffineConstraint &c : context.constraints())
      set_.add_constraint(c);
  }

  Facts with_loop(const std::vector<AffineExpr> &lower,
                  const std::vector<AffineExpr> &upper) const {
    Facts f = *this;
    unsigned d = f.set_.append_dims(1);
    for (const AffineExpr &e : lower)
      f.set_.add_inequality(AffineExpr::dim(d) - e);
    for (const AffineExpr &e : upper)
      f.set_.add_inequality(e - AffineExpr::dim(d));
    return f;
  }

  Facts with(const IntegerSet &cond) const {
    Facts f = *this;
    if (cond.num_dims() != f.set_.num_dims())
      return f;
    f.set_ = f.set_.intersect(cond);
    return f;
  }

  unsigned depth() const { return set_.num_dims(); }

  /// Adding `e >= 0` (or `e > 0` when strict) makes the facts infeasible.
  bool refutes(const AffineExpr &e, bool strict = false) const {
    IntegerSet s = set_;
    s.add_inequality(strict ? e - 1 : e);
    return is_empty(s);
  }

  bool implies(const AffineConstraint &c) const {
    if (!refutes(-c.expr, true))
      return false;
    return c.kind == ConstraintKind::Inequality || refutes(c.expr, true);
  }

  bool excludes(const IntegerSet &cond) const { return is_empty(set_.intersect(cond)); }

private:
  IntegerSet set_;
};

/// A statement's instances seen in time space.
struct StmtScan {
  const scop::PolyStmt *stmt = nullptr;
  /// Over the schedule dims, with the domain's existentials after them.
  IntegerSet time;
  /// `time` restricted by the statement's guard; loops scan `time`.
  IntegerSet instances;
  /// Original iterators as functions of the time dims.
  std::vector<AffineExpr> iv;
  std::vector<std::optional<Int>> fixed;
};

StmtScan scan_statement(const scop::Scop &scop, const scop::PolyStmt &s) {
  unsigned S = scop.schedule_dims();
  unsigned n = s.num_dims();
  unsigned nsyms = static_cast<unsigned>(scop.symbols.size());
  StmtScan out;
  out.stmt = &s;
  out.fixed.resize(S);
  std::vector<unsigned> loops;
  IntMatrix a;
  std::vector<Int> offsets;
  for (unsigned p = 0; p < S; ++p) {
    const AffineExpr &r = s.schedule.result(p);
    if (r.is_constant()) {
      out.fixed[p] = r.constant_term();
      continue;
    }
    if (!r.is_linear() || r.uses_symbols())
      fail(ErrorKind::Unsupported, "schedule of " + s.name + " is not a linear function of its dims");
    std::vector<Int> row(n);
    for (unsigned d = 0; d < n; ++d)
      row[d] = r.dim_coeff(d);
    a.push_back(std::move(row));
    offsets.push_back(r.constant_term());
    loops.push_back(p);
  }
  if (loops.size() != n)
    fail(ErrorKind::Unsupported, "schedule of " + s.name + " has " +
                                     std::to_string(loops.size()) + " loop positions for " +
                                     std::to_string(n) + " domain dims");
  IntMatrix inv = n ? unimodular_inverse(a) : IntMatrix{};

  auto image = [&](const IntegerSet &dom) {
    std::vector<AffineExpr> repl(dom.num_vars(), AffineExpr(0));
    for (unsigned d = 0; d < n; ++d) {
      AffineExpr e(0);
      for (unsigned j = 0; j < n; ++j)
        if (inv[d][j] != 0)
          e += (AffineExpr::dim(loops[j]) - offsets[j]) * inv[d][j];
      repl[d] = e;
    }
    for (unsigned e = 0; e < dom.num_exists(); ++e)
      repl[n + e] = AffineExpr::dim(S + e);
    IntegerSet t(S, nsyms);
    t.append_exists(dom.num_exists());
    std::vector<AffineExpr> syms = symbol_ids(nsyms);
    for (const AffineConstraint &c : dom.constraints())
      t.add_constraint({c.expr.substitute(repl, syms), c.kind});
    for (const AffineConstraint &c : scop.context.constraints())
      t.add_constraint(c);
    for (unsigned p = 0; p < S; ++p)
      if (out.fixed[p])
        t.add_equality(AffineExpr::dim(p) - *out.fixed[p]);
    return std::pair{t, repl};
  };
  auto [time, repl] = image(s.domain);
  out.time = std::move(time);
  out.instances = image(s.domain.intersect(s.guard)).first;
  out.iv.assign(repl.begin(), repl.begin() + s.depth);
  return out;
}

void dedupe(std::vector<AffineExpr> &v) {
  std::vector<AffineExpr> out;
  for (AffineExpr &e : v)
    if (std::find(out.begin(), out.end(), e) == out.end())
      out.push_back(std::move(e));
  v = std::move(out);
}

class Generator {
public:
  explicit Generator(const scop::Scop &scop)
      : scop_(scop), S_(scop.schedule_dims()),
        nsyms_(static_cast<unsigned>(scop.symbols.size())) {
    reserved_.insert(scop.symbols.begin(), scop.symbols.end());
    for (const scop::PolyStmt &s : scop.statements)
      reserved_.insert(s.dim_names.begin(), s.dim_names.end());
  }

  ir::Module run() {
    ir::Module m;
    m.name = scop_.name;
    m.symbols = scop_.symbols;
    for (const scop::ArrayInfo &a : scop_.arrays)
      m.arrays.push_back({a.name, a.elem, a.extents});
    std::vector<unsigned> live;
    for (const scop::PolyStmt &s : scop_.statements) {
      m.statements.push_back({s.name, s.iterators(), s.body});
      StmtScan scan = scan_statement(scop_, s);
      if (!is_empty(scan.instances))
        live.push_back(static_cast<unsigned>(scans_.size()));
      scans_.push_back(std::move(scan));
    }
    env_.assign(S_, AffineExpr(0));
    m.body = generate(live, 0, Facts(scop_.context, nsyms_));
    return m;
  }

private:
  Block generate(const std::vector<unsigned> &group, unsigned p, const Facts &facts) {
    Block out;
    if (group.empty())
      return out;
    if (p == S_) {
      for (unsigned idx : group)
        leaf(scans_[idx], facts, out);
      return out;
    }
    bool sequence = std::all_of(group.begin(), group.end(),
                                [&](unsigned i) { return scans_[i].fixed[p].has_value(); });
    if (sequence) {
      std::map<Int, std::vector<unsigned>> by_value;
      for (unsigned idx : group)
        by_value[*scans_[idx].fixed[p]].push_back(idx);
      for (auto &[value, members] : by_value) {
        env_[p] = AffineExpr(value);
        Block b = generate(members, p + 1, facts);
        out.insert(out.end(), std::make_move_iterator(b.begin()),
                   std::make_move_iterator(b.end()));
      }
      return out;
    }
    ForOp f;
    f.var = loop_name(group, p);
    f.parallel = p < scop_.parallel.size() && scop_.parallel[p];
    shared_bounds(group, p, f.lower, f.upper);
    env_[p] = AffineExpr::dim(facts.depth());
    active_.push_back(f.var);
    f.body = generate(group, p + 1, facts.with_loop(f.lower, f.upper));
    active_.pop_back();
    if (!f.body.empty())
      out.push_back(Op{std::move(f)});
    return out;
  }

  std::vector<AffineExpr> to_ir(const std::vector<AffineExpr> &v) const {
    std::vector<AffineExpr> out;
    std::vector<AffineExpr> syms = symbol_ids(nsyms_);
    for (const AffineExpr &e : v)
      out.push_back(e.substitute(env_, syms));
    return out;
  }

  void shared_bounds(const std::vector<unsigned> &group, unsigned p,
                     std::vector<AffineExpr> &lower, std::vector<AffineExpr> &upper) {
    std::vector<AffineExpr> lo, up;
    for (unsigned idx : group) {
      DimBounds b = bounds_for_dim(scans_[idx].time, p);
      lo.insert(lo.end(), b.lower.begin(), b.lower.end());
      up.insert(up.end(), b.upper.begin(), b.upper.end());
    }
    dedupe(lo);
    dedupe(up);
    if (group.size() > 1) {
      AffineExpr c = AffineExpr::dim(p);
      auto valid = [&](const AffineExpr &violation) {
        return std::all_of(group.begin(), group.end(), [&](unsigned idx) {
          IntegerSet s = scans_[idx].time;
          s.add_inequality(violation - 1);
          return is_empty(s);
        });
      };
      std::erase_if(lo, [&](const AffineExpr &e) { return !valid(e - c); });
      std::erase_if(up, [&](const AffineExpr &e) { return !valid(c - e); });
      if (lo.empty() || up.empty())
        fail(ErrorKind::Unsupported, "statements sharing schedule dimension " +
                                         std::to_string(p) + " have no common " +
                                         (lo.empty() ? "lower" : "upper") + " loop bound");
    }
    sort_bounds(lo);
    sort_bounds(up);
    lower = to_ir(lo);
    upper = to_ir(up);
    dedupe(lower);
    dedupe(upper);
  }

  std::string loop_name(const std::vector<unsigned> &group, unsigned p) {
    std::optional<std::string> name;
    for (unsigned idx : group) {
      const scop::PolyStmt &s = *scans_[idx].stmt;
      std::optional<unsigned> d = s.schedule.result(p).as_dim();
      std::string n = d && *d < s.dim_names.size() ? s.dim_names[*d] : "";
      if (n.empty() || (name && *name != n)) {
        name.reset();
        break;
      }
      name = n;
    }
    auto free = [&](const std::string &n) {
      return std::find(active_.begin(), active_.end(), n) == active_.end() &&
             std::find(scop_.symbols.begin(), scop_.symbols.end(), n) == scop_.symbols.end();
    };
    if (name && free(*name))
      return *name;
    std::string t;
    do
      t = "t" + std::to_string(++temps_);
    while (reserved_.count(t) || !free(t));
    return t;
  }

  void leaf(const StmtScan &scan, const Facts &facts, Block &out) const {
    unsigned depth = facts.depth();
    std::vector<AffineExpr> repl = env_;
    for (unsigned e = 0; e < scan.instances.num_exists(); ++e)
      repl.push_back(AffineExpr::dim(depth + e));
    std::vector<AffineExpr> syms = symbol_ids(nsyms_);

    IntegerSet full(depth, nsyms_);
    full.append_exists(scan.instances.num_exists());
    for (const AffineConstraint &c : scan.instances.constraints())
      full.add_constraint({c.expr.substitute(repl, syms), c.kind});
    if (facts.excludes(full))
      return;

    IntegerSet cond(depth, nsyms_);
    cond.append_exists(full.num_exists());
    bool guarded = false;
    for (const Row &r : full.rows()) {
      bool uses_exists = false;
      for (unsigned e = 0; e < full.num_exists(); ++e)
        uses_exists |= r.coeffs[depth + e] != 0;
      AffineConstraint c{full.row_expr(r),
                         r.equality ? ConstraintKind::Equality : ConstraintKind::Inequality};
      if (!uses_exists && facts.implies(c))
        continue;
      cond.add_row(r);
      guarded = true;
    }
    std::vector<unsigned> unused;
    for (unsigned e = 0; e < cond.num_exists(); ++e) {
      unsigned col = depth + e;
      if (std::none_of(cond.rows().begin(), cond.rows().end(),
                       [col](const Row &r) { return r.coeffs[col] != 0; }))
        unused.push_back(col);
    }
    cond.drop_zero_vars(unused);

    CallOp call;
    call.callee = scan.stmt->name;
    call.operands = to_ir(scan.iv);
    if (!guarded) {
      out.push_back(Op{std::move(call)});
      return;
    }
    IfOp i;
    i.cond = std::move(cond);
    i.then_body.push_back(Op{std::move(call)});
    out.push_back(Op{std::move(i)});
  }

  const scop::Scop &scop_;
  unsigned S_;
  unsigned nsyms_;
  std::vector<StmtScan> scans_;
  std::vector<AffineExpr> env_;
  std::vector<std::string> active_;
  std::set<std::string> reserved_;
  unsigned temps_ = 0;
};

/// Drops results of a max (or min) that never exceed (or undercut) another
/// kept result; of mutually equal results the first one stays.
void prune(std::vector<AffineExpr> &v, const Facts &facts, bool lower) {
  dedupe(v);
  std::vector<bool> keep(v.size(), true);
  for (std::size_t i = 0; i < v.size(); ++i) {
    for (std::size_t j = 0; j < v.size() && keep[i]; ++j) {
      if (i == j || !keep[j])
        continue;
      // Lower: v[i] is redundant if v[i] <= v[j] always, i.e. v[i] > v[j] is refuted.
      AffineExpr gap = lower ? v[i] - v[j] : v[j] - v[i];
      if (facts.refutes(gap, true))
        keep[i] = false;
    }
  }
  std::vector<AffineExpr> out;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (keep[i])
      out.push_back(v[i]);
  v = std::move(out);
}

Block simplify_block(const Block &b, const Facts &facts) {
  Block out;
  for (const Op &op : b) {
    if (const auto *f = std::get_if<ForOp>(&op.node)) {
      ForOp g = *f;
      prune(g.lower, facts, true);
      prune(g.upper, facts, false);
      g.body = simplify_block(g.body, facts.with_loop(g.lower, g.upper));
      out.push_back(Op{std::move(g)});
    } else if (const auto *i = std::get_if<IfOp>(&op.node)) {
      IfOp j = *i;
      j.then_body = simplify_block(i->then_body, facts.with(i->cond));
      j.else_body = simplify_block(i->else_body, facts);
      out.push_back(Op{std::move(j)});
    } else {
      out.push_back(op);
    }
  }
  return out;
}

void dump_block(const Block &b, const ir::Module &m, std::vector<std::string> &vars,
                std::string &out) {
  for (const Op &op : b) {
    if (const auto *f = std::get_if<ForOp>(&op.node)) {
      NameTable names{vars, m.symbols};
      auto list = [&](const std::vector<AffineExpr> &v) {
        std::string s;
        for (std::size_t k = 0; k < v.size(); ++k)
          s += (k ? ", " : "") + to_string(v[k], names);
        return s;
      };
      out += "loop " + f->var + " depth " + std::to_string(vars.size()) +
             (f->parallel ? " parallel" : "") + " : lower max(" + list(f->lower) +
             ") upper min(" + list(f->upper) + ")\n";
      vars.push_back(f->var);
      dump_block(f->body, m, vars, out);
      vars.pop_back();
    } else if (const auto *i = std::get_if<IfOp>(&op.node)) {
      dump_block(i->then_body, m, vars, out);
      dump_block(i->else_body, m, vars, out);
    }
  }
}

} // namespace

ir::Module generate_loops(const scop::Scop &scop) { return Generator(scop).run(); }

ir::Module simplify_bounds(const ir::Module &m, const IntegerSet &context) {
  ir::Module out = m;
  out.body = simplify_block(m.body, Facts(context, static_cast<unsigned>(m.symbols.size())));
  return out;
}

std::string dump_bounds(const ir::Module &m) {
  std::string out = "module " + m.name + "\n";
  std::vector<std::string> vars;
  dump_block(m.body, m, vars, out);
  return out;
}

} // namespace polyhls::codegen
