//===- hls.cpp - Partition, directives and C emission ----------------------===//

#include "polyhls/hls/hls.hpp"

#include "polyhls/affine/fm.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

namespace polyhls::hls {

using affine::AffineExpr;
using affine::IntegerSet;
using frontend::Expr;
using frontend::ExprKind;

const char *to_string(Transfer t) {
  switch (t) {
  case Transfer::In:
    return "in";
  case Transfer::Out:
    return "out";
  case Transfer::InOut:
    return "inout";
  }
  return "?";
}

namespace {

void collect_reads(const Expr &e, std::set<std::string> &out) {
  if (e.kind == ExprKind::ArrayRef)
    out.insert(e.name);
  for (const Expr &o : e.operands)
    collect_reads(o, out);
}

// Whether the write `acc` of `st` hits every element of `a` for every
// symbol value allowed by `context`.
bool covers(const scop::PolyStmt &st, const scop::Access &acc, const scop::ArrayInfo &a,
            const IntegerSet &context) {
  unsigned n = st.depth;
  const IntegerSet &dom = st.domain;
  if (dom.num_dims() != n || dom.num_exists() != 0 || !st.guard.rows().empty() ||
      acc.map.num_results() != n || a.extents.size() != n)
    return false;
  unsigned ns = dom.num_symbols();
  // subscripts = M x + c(s) with M unimodular.
  affine::IntMatrix m(n, std::vector<Int>(n, 0));
  std::vector<AffineExpr> offset;
  for (unsigned r = 0; r < n; ++r) {
    const AffineExpr &e = acc.map.result(r);
    if (!e.is_linear())
      return false;
    AffineExpr off(e.constant_term());
    for (const auto &[t, c] : e.terms()) {
      if (t.kind == affine::TermKind::Dim)
        m[r][t.index] = c;
      else
        off += AffineExpr::symbol(t.index) * c;
    }
    offset.push_back(off);
  }
  affine::IntMatrix inv;
  try {
    inv = affine::unimodular_inverse(m);
  } catch (const Error &) {
    return false;
  }
  // x = inv (a - c(s)) in terms of the element index a.
  std::vector<AffineExpr> x_of_a;
  for (unsigned i = 0; i < n; ++i) {
    AffineExpr e;
    for (unsigned k = 0; k < n; ++k)
      if (inv[i][k] != 0)
        e += (AffineExpr::dim(k) - offset[k]) * inv[i][k];
    x_of_a.push_back(e);
  }
  std::vector<AffineExpr> syms;
  for (unsigned s = 0; s < ns; ++s)
    syms.push_back(AffineExpr::symbol(s));

  IntegerSet box(n, ns);
  box = box.intersect(context.num_dims() == n ? context : context.lift(n, 0));
  for (unsigned k = 0; k < n; ++k) {
    box.add_inequality(AffineExpr::dim(k));
    box.add_inequality(a.extents[k] - 1 - AffineExpr::dim(k));
  }
  for (const affine::AffineConstraint &c : dom.constraints()) {
    AffineExpr h = c.expr.substitute(x_of_a, syms);
    IntegerSet below = box;
    below.add_inequality(-h - 1);
    if (!affine::is_empty(below))
      return false;
    if (c.kind == affine::ConstraintKind::Equality) {
      IntegerSet above = box;
      above.add_inequality(h - 1);
      if (!affine::is_empty(above))
        return false;
    }
  }
  return true;
}

bool has_inner_loop(const LBlock &b) {
  for (const LStmt &s : b) {
    if (std::holds_alternative<LFor>(s.node))
      return true;
    if (const auto *i = std::get_if<LIf>(&s.node))
      if (has_inner_loop(i->then_body) || has_inner_loop(i->else_body))
        return true;
  }
  return false;
}

void annotate(LBlock &b, const DirectivePolicy &policy) {
  for (LStmt &s : b) {
    if (auto *f = std::get_if<LFor>(&s.node)) {
      f->pipeline = !has_inner_loop(f->body);
      f->unroll.reset();
      if (f->parallel && f->lower.is_const() && f->upper.is_const()) {
        Int trip = f->upper.value - f->lower.value + 1;
        if (trip >= 1 && trip <= policy.unroll_limit)
          f->unroll = trip;
      }
      annotate(f->body, policy);
    } else if (auto *i = std::get_if<LIf>(&s.node)) {
      annotate(i->then_body, policy);
      annotate(i->else_body, policy);
    }
  }
}

} // namespace

HlsProgram partition(const ir::Module &m, const scop::Scop *scop) {
  HlsProgram p;
  p.kernel = lower_to_standard(m);
  std::set<std::string> reads, writes;
  for (const ir::StmtDef &s : m.statements) {
    collect_reads(s.body.value, reads);
    writes.insert(s.body.target.name);
  }
  for (const LArray &a : p.kernel.arrays) {
    bool r = reads.count(a.name) != 0, w = writes.count(a.name) != 0;
    if (!r && !w)
      continue;
    Transfer kind = r && w ? Transfer::InOut : r ? Transfer::In : Transfer::InOut;
    if (!r && scop) {
      const scop::ArrayInfo *info = scop->find_array(a.name);
      for (const scop::PolyStmt &st : scop->statements)
        for (const scop::Access &acc : st.writes)
          if (info && acc.array == a.name && covers(st, acc, *info, scop->context))
            kind = Transfer::Out;
    }
    p.transfers.push_back({a.name, kind});
  }
  return p;
}

HlsProgram insert_directives(HlsProgram p, const DirectivePolicy &policy) {
  annotate(p.kernel.body, policy);
  return p;
}

std::vector<LArray> host_arrays(const std::vector<HlsProgram> &ps) {
  std::vector<LArray> out;
  for (const HlsProgram &p : ps)
    for (const LArray &a : p.kernel.arrays)
      if (std::none_of(out.begin(), out.end(), [&](const LArray &o) { return o.name == a.name; }))
        out.push_back(a);
  return out;
}

std::vector<std::string> host_symbols(const std::vector<HlsProgram> &ps) {
  std::vector<std::string> out;
  for (const HlsProgram &p : ps)
    for (const std::string &s : p.kernel.symbols)
      if (std::find(out.begin(), out.end(), s) == out.end())
        out.push_back(s);
  return out;
}

//===----------------------------------------------------------------------===//
// C emission
//===----------------------------------------------------------------------===//

namespace {

const char *kPrelude = R"(#include <stdio.h>
#include <stdlib.h>
#include <string.h>

static inline long long floord(long long a, long long b) {
  long long q = a / b;
  return (a % b != 0 && ((a < 0) != (b < 0))) ? q - 1 : q;
}

static inline long long ceild(long long a, long long b) {
  long long q = a / b;
  return (a % b != 0 && ((a < 0) == (b < 0))) ? q + 1 : q;
}

static inline long long floormod(long long a, long long b) {
  long long r = a % b;
  return (r != 0 && ((r < 0) != (b < 0))) ? r + b : r;
}

static inline long long max(long long a, long long b) { return a > b ? a : b; }

static inline long long min(long long a, long long b) { return a < b ? a : b; }
)";

const char *kHostHelpers = R"(
static int load(const char *path, void *buf, size_t n, int is_float) {
  FILE *f = fopen(path, "r");
  char tok[128];
  size_t k;
  if (!f) {
    fprintf(stderr, "cannot open %s\n", path);
    return 1;
  }
  for (k = 0; k < n; ++k) {
    if (fscanf(f, "%127s", tok) != 1) {
      fprintf(stderr, "%s: expected %lu values\n", path, (unsigned long)n);
      fclose(f);
      return 1;
    }
    if (is_float)
      ((double *)buf)[k] = strtod(tok, NULL);
    else
      ((long long *)buf)[k] = strtoll(tok, NULL, 10);
  }
  fclose(f);
  return 0;
}

static void dump(const char *name, const void *buf, size_t n, int is_float) {
  size_t k;
  printf("%s:", name);
  for (k = 0; k < n; ++k) {
    if (is_float)
      printf(" %.17g", ((const double *)buf)[k]);
    else
      printf(" %lld", ((const long long *)buf)[k]);
  }
  printf("\n");
}
)";

const char *c_type(ElemKind k) { return k == ElemKind::Int64 ? "long long" : "double"; }

std::string c_int(Int v) {
  std::string s = std::to_string(v);
  if (v > 2147483647 || v < -2147483647)
    s += "LL";
  return s;
}

std::string c_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s = buf;
  if (s.find_first_of(".eEn") == std::string::npos)
    s += ".0";
  return s;
}

bool is_atom(const IExpr &e) {
  return (e.kind == IExprKind::Const && e.value >= 0) || e.kind == IExprKind::Var ||
         e.kind == IExprKind::FloorDiv || e.kind == IExprKind::CeilDiv ||
         e.kind == IExprKind::Mod || e.kind == IExprKind::Max || e.kind == IExprKind::Min;
}

struct BodyPrinter {
  const std::vector<std::string> &iterators;
  const std::vector<IExpr> &args;

  // Precedence: 1 additive, 2 multiplicative, 3 unary/atoms.
  std::string print(const Expr &e, int prec) const {
    auto wrap = [&](int own, std::string s) { return own < prec ? "(" + s + ")" : s; };
    switch (e.kind) {
    case ExprKind::IntLit:
      return c_int(e.int_value);
    case ExprKind::FloatLit:
      return c_double(e.float_value);
    case ExprKind::Var:
      for (std::size_t k = 0; k < iterators.size(); ++k)
        if (iterators[k] == e.name)
          return is_atom(args[k]) ? to_c(args[k]) : "(" + to_c(args[k]) + ")";
      return e.name;
    case ExprKind::ArrayRef: {
      std::string s = e.name;
      for (const Expr &sub : e.operands)
        s += "[" + print(sub, 0) + "]";
      return s;
    }
    case ExprKind::Neg:
      return wrap(3, "-" + print(e.operands[0], 3));
    case ExprKind::Add:
      return wrap(1, print(e.operands[0], 1) + " + " + print(e.operands[1], 2));
    case ExprKind::Sub:
      return wrap(1, print(e.operands[0], 1) + " - " + print(e.operands[1], 2));
    case ExprKind::Mul:
      return wrap(2, print(e.operands[0], 2) + " * " + print(e.operands[1], 3));
    }
    return "?";
  }
};

struct CEmitter {
  std::string out;
  const LoopProgram *prog = nullptr;
  int parallel_depth = 0;

  void line(int indent, const std::string &s) {
    out.append(static_cast<std::size_t>(indent) * 2, ' ');
    out += s;
    out += '\n';
  }

  static std::string cond(const LCond &c) {
    return to_c(c.expr) + (c.equality ? " == 0" : " >= 0");
  }

  static bool simple(const IExpr &e) {
    return e.kind == IExprKind::Const || e.kind == IExprKind::Var;
  }

  void block(const LBlock &b, int indent) {
    for (const LStmt &s : b) {
      if (const auto *f = std::get_if<LFor>(&s.node)) {
        loop(*f, indent);
      } else if (const auto *i = std::get_if<LIf>(&s.node)) {
        std::string c;
        for (std::size_t k = 0; k < i->conds.size(); ++k)
          c += (k ? " && " : "") + cond(i->conds[k]);
        line(indent, "if (" + (c.empty() ? std::string("1") : c) + ") {");
        block(i->then_body, indent + 1);
        if (!i->else_body.empty()) {
          line(indent, "} else {");
          block(i->else_body, indent + 1);
        }
        line(indent, "}");
      } else {
        const auto &c = std::get<LCall>(s.node);
        const ir::StmtDef *def = prog->find_statement(c.callee);
        if (!def)
          fail(ErrorKind::Malformed, "call to undefined statement @" + c.callee);
        BodyPrinter bp{def->iterators, c.args};
        line(indent, bp.print(def->body.target, 0) + " = " + bp.print(def->body.value, 0) +
                         "; /* " + c.callee + " */");
      }
    }
  }

  void loop(const LFor &f, int indent) {
    std::string lb = to_c(f.lower), ub = to_c(f.upper);
    bool hoist = f.parallel && (!simple(f.lower) || !simple(f.upper));
    if (hoist) {
      ++parallel_depth;
      std::string suffix = parallel_depth > 1 ? std::to_string(parallel_depth) : "";
      line(indent, "long long lbp" + suffix + " = " + lb + ";");
      line(indent, "long long ubp" + suffix + " = " + ub + ";");
      lb = "lbp" + suffix;
      ub = "ubp" + suffix;
    }
    line(indent, "for (long long " + f.var + " = " + lb + "; " + f.var + " <= " + ub + "; " +
                     f.var + "++) {");
    if (f.pipeline)
      line(indent + 1, "#pragma HLS pipeline II=1");
    if (f.unroll)
      line(indent + 1, "#pragma HLS unroll factor=" + std::to_string(*f.unroll));
    block(f.body, indent + 1);
    line(indent, "}");
    if (hoist)
      --parallel_depth;
  }

  static std::string array_param(const LArray &a) {
    std::string s = std::string(c_type(a.elem)) + " " + a.name;
    for (const IExpr &e : a.extents)
      s += "[" + to_c(e) + "]";
    return s;
  }

  void kernel(const HlsProgram &p) {
    prog = &p.kernel;
    std::string sig = "void " + p.kernel_name() + "(";
    bool first = true;
    for (const std::string &s : p.kernel.symbols) {
      sig += (first ? "" : ", ") + ("long long " + s);
      first = false;
    }
    for (const ArrayTransfer &t : p.transfers)
      for (const LArray &a : p.kernel.arrays)
        if (a.name == t.array) {
          sig += (first ? "" : ", ") + array_param(a);
          first = false;
        }
    if (first)
      sig += "void";
    line(0, "");
    for (const ArrayTransfer &t : p.transfers)
      line(0, "/* " + t.array + ": " + to_string(t.kind) + " */");
    line(0, sig + ") {");
    block(p.kernel.body, 1);
    line(0, "}");
  }

  static std::string size_expr(const LArray &a) {
    if (a.extents.empty())
      return "1";
    std::string s;
    for (std::size_t k = 0; k < a.extents.size(); ++k)
      s += (k ? " * " : "") + ("(size_t)(" + to_c(a.extents[k]) + ")");
    return s;
  }

  // Device pointer cast to the kernel's VLA parameter type.
  static std::string device_arg(const LArray &a) {
    if (a.extents.size() <= 1)
      return "d_" + a.name;
    std::string s = std::string("(") + c_type(a.elem) + " (*)";
    for (std::size_t k = 1; k < a.extents.size(); ++k)
      s += "[" + to_c(a.extents[k]) + "]";
    return s + ")d_" + a.name;
  }

  void host(const std::vector<HlsProgram> &ps) {
    std::vector<LArray> arrays = host_arrays(ps);
    std::vector<std::string> syms = host_symbols(ps);
    out += kHostHelpers;
    line(0, "");
    line(0, "int main(int argc, char **argv) {");
    for (const std::string &s : syms)
      line(1, "long long " + s + " = 0;");
    for (const LArray &a : arrays)
      line(1, "const char *init_" + a.name + " = NULL;");
    line(1, "int ai_;");
    line(1, "for (ai_ = 1; ai_ < argc; ++ai_) {");
    line(2, "const char *arg_ = argv[ai_];");
    bool first = true;
    auto branch = [&](const std::string &name, const std::string &action) {
      std::string key = "\"" + name + "=\"";
      line(2, std::string(first ? "if" : "else if") + " (strncmp(arg_, " + key + ", " +
                  std::to_string(name.size() + 1) + ") == 0)");
      line(3, action);
      first = false;
    };
    for (const std::string &s : syms)
      branch(s, s + " = strtoll(arg_ + " + std::to_string(s.size() + 1) + ", NULL, 10);");
    for (const LArray &a : arrays)
      branch(a.name, "init_" + a.name + " = arg_ + " + std::to_string(a.name.size() + 1) + ";");
    line(2, std::string(first ? "" : "else ") + "{");
    line(3, "fprintf(stderr, \"unknown argument %s\\n\", arg_);");
    line(3, "return 1;");
    line(2, "}");
    line(1, "}");
    for (const LArray &a : arrays) {
      std::set<std::string> checked;
      for (const IExpr &e : a.extents)
        if (!e.is_const() && checked.insert(to_c(e)).second)
          line(1, "if ((" + to_c(e) + ") < 0) { fprintf(stderr, \"array " + a.name +
                    " has a negative extent\\n\"); return 1; }");
      std::string n = "n_" + a.name, t = c_type(a.elem);
      line(1, "size_t " + n + " = " + size_expr(a) + ";");
      line(1, t + " *h_" + a.name + " = calloc(" + n + " ? " + n + " : 1, sizeof(" + t + "));");
      line(1, "if (init_" + a.name + " && load(init_" + a.name + ", h_" + a.name + ", " + n +
                  ", " + (a.elem == ElemKind::Float64 ? "1" : "0") + "))");
      line(2, "return 1;");
    }
    for (const HlsProgram &p : ps) {
      line(1, "{");
      std::vector<const LArray *> used;
      for (const ArrayTransfer &t : p.transfers)
        for (const LArray &a : arrays)
          if (a.name == t.array)
            used.push_back(&a);
      for (std::size_t k = 0; k < used.size(); ++k) {
        const LArray &a = *used[k];
        std::string n = "n_" + a.name, t = c_type(a.elem);
        line(2, t + " *d_" + a.name + " = calloc(" + n + " ? " + n + " : 1, sizeof(" + t + "));");
        if (p.transfers[k].kind != Transfer::Out)
          line(2, "memcpy(d_" + a.name + ", h_" + a.name + ", " + n + " * sizeof(" + t + "));");
      }
      std::string call = p.kernel_name() + "(";
      bool f = true;
      for (const std::string &s : p.kernel.symbols) {
        call += (f ? "" : ", ") + s;
        f = false;
      }
      for (const LArray *a : used) {
        call += (f ? "" : ", ") + device_arg(*a);
        f = false;
      }
      line(2, call + ");");
      for (std::size_t k = 0; k < used.size(); ++k) {
        const LArray &a = *used[k];
        if (p.transfers[k].kind != Transfer::In)
          line(2, "memcpy(h_" + a.name + ", d_" + a.name + ", n_" + a.name + " * sizeof(" +
                      c_type(a.elem) + "));");
        line(2, "free(d_" + a.name + ");");
      }
      line(1, "}");
    }
    for (const LArray &a : arrays) {
      line(1, "dump(\"" + a.name + "\", h_" + a.name + ", n_" + a.name + ", " +
                  (a.elem == ElemKind::Float64 ? "1" : "0") + ");");
      line(1, "free(h_" + a.name + ");");
    }
    line(1, "return 0;");
    line(0, "}");
  }
};

} // namespace

std::string emit_c(const std::vector<HlsProgram> &ps) {
  CEmitter e;
  e.out = kPrelude;
  for (const HlsProgram &p : ps)
    e.kernel(p);
  e.host(ps);
  return e.out;
}

std::string emit_c(const HlsProgram &p) { return emit_c(std::vector<HlsProgram>{p}); }

} // namespace polyhls::hls
