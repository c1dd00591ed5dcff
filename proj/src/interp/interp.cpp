//===- interp.cpp - Reference interpreter ----------------------------------===//

#include "polyhls/interp/interp.hpp"

#include "polyhls/affine/fm.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <random>
#include <sstream>
#include <unordered_map>

namespace polyhls::interp {

using frontend::Expr;
using frontend::ExprKind;

std::size_t ArrayState::size() const {
  return elem == ElemKind::Int64 ? ints.size() : floats.size();
}

bool operator==(const ArrayState &a, const ArrayState &b) {
  if (a.name != b.name || a.elem != b.elem || a.shape != b.shape || a.ints != b.ints ||
      a.floats.size() != b.floats.size())
    return false;
  return a.floats.empty() ||
         std::memcmp(a.floats.data(), b.floats.data(), a.floats.size() * sizeof(double)) == 0;
}

const ArrayState *Machine::find_array(std::string_view name) const {
  for (const ArrayState &a : arrays)
    if (a.name == name)
      return &a;
  return nullptr;
}

ArrayState *Machine::find_array(std::string_view name) {
  for (ArrayState &a : arrays)
    if (a.name == name)
      return &a;
  return nullptr;
}

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string join(std::span<const Int> v, const char *sep = ", ") {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k)
    s += (k ? sep : "") + std::to_string(v[k]);
  return s;
}

ArrayState make_array(std::string name, ElemKind elem, std::vector<Int> shape) {
  ArrayState a;
  a.name = std::move(name);
  a.elem = elem;
  std::size_t n = 1;
  for (Int e : shape) {
    if (e < 0)
      fail(ErrorKind::Execution, "array " + a.name + " has negative extent " + std::to_string(e));
    n = static_cast<std::size_t>(checked::mul(static_cast<Int>(n), e));
  }
  a.shape = std::move(shape);
  if (elem == ElemKind::Int64)
    a.ints.assign(n, 0);
  else
    a.floats.assign(n, 0.0);
  return a;
}

void load_text(ArrayState &a, const std::string &text) {
  std::istringstream in(text);
  std::string tok;
  std::size_t k = 0, n = a.size();
  while (in >> tok) {
    if (k == n)
      fail(ErrorKind::InvalidArgument,
           "init data for " + a.name + " has more than " + std::to_string(n) + " values");
    char *end = nullptr;
    errno = 0;
    if (a.elem == ElemKind::Int64)
      a.ints[k] = std::strtoll(tok.c_str(), &end, 10);
    else
      a.floats[k] = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0' || (a.elem == ElemKind::Int64 && errno == ERANGE))
      fail(ErrorKind::InvalidArgument, "init data for " + a.name + ": bad value '" + tok + "'");
    ++k;
  }
  if (k != n)
    fail(ErrorKind::InvalidArgument, "init data for " + a.name + ": expected " +
                                         std::to_string(n) + " values, got " + std::to_string(k));
}

struct Value {
  bool fl = false;
  Int i = 0;
  double f = 0.0;

  double as_double() const { return fl ? f : static_cast<double>(i); }
};

// Names bound for one statement body: iterators (or enclosing loop
// variables) first, then the machine symbols.
struct Scope {
  std::span<const std::string> names;
  std::span<const Int> values;
};

class Exec {
public:
  Exec(Machine &m, const RunOptions &o) : m_(m), opts_(o) {
    if (o.shuffle_seed)
      rng_.seed(*o.shuffle_seed);
  }

  bool shuffling() const { return opts_.shuffle_seed.has_value(); }
  std::mt19937_64 &rng() { return rng_; }

  void step() {
    if (++steps_ > opts_.max_instances)
      fail(ErrorKind::Execution, "step limit of " + std::to_string(opts_.max_instances) +
                                     " exceeded");
  }

  Int symbol(std::string_view name) const {
    for (const auto &[n, v] : m_.symbols)
      if (n == name)
        return v;
    fail(ErrorKind::Execution, "unbound symbol " + std::string(name));
  }

  Value eval(const Expr &e, const Scope &s) {
    switch (e.kind) {
    case ExprKind::IntLit:
      return {false, e.int_value, 0.0};
    case ExprKind::FloatLit:
      return {true, 0, e.float_value};
    case ExprKind::Var:
      for (std::size_t k = s.names.size(); k-- > 0;)
        if (s.names[k] == e.name)
          return {false, s.values[k], 0.0};
      return {false, symbol(e.name), 0.0};
    case ExprKind::ArrayRef: {
      ArrayState &a = array(e.name);
      std::size_t at = index(a, e, s);
      if (a.elem == ElemKind::Int64)
        return {false, a.ints[at], 0.0};
      return {true, 0, a.floats[at]};
    }
    case ExprKind::Neg: {
      Value v = eval(e.operands[0], s);
      if (v.fl)
        return {true, 0, -v.f};
      return {false, checked::neg(v.i), 0.0};
    }
    case ExprKind::Add:
    case ExprKind::Sub:
    case ExprKind::Mul: {
      Value a = eval(e.operands[0], s);
      Value b = eval(e.operands[1], s);
      if (a.fl || b.fl) {
        double x = a.as_double(), y = b.as_double();
        double r = e.kind == ExprKind::Add ? x + y : e.kind == ExprKind::Sub ? x - y : x * y;
        return {true, 0, r};
      }
      Int r = e.kind == ExprKind::Add   ? checked::add(a.i, b.i)
              : e.kind == ExprKind::Sub ? checked::sub(a.i, b.i)
                                        : checked::mul(a.i, b.i);
      return {false, r, 0.0};
    }
    }
    fail(ErrorKind::Internal, "bad expression kind");
  }

  Int eval_int(const Expr &e, const Scope &s) {
    Value v = eval(e, s);
    if (v.fl)
      fail(ErrorKind::Execution, "floating-point value used as an integer: " +
                                     frontend::print_expr(e));
    return v.i;
  }

  void assign(const frontend::AssignStmt &st, const std::string &stmt, const Scope &s,
              std::span<const Int> iv) {
    step();
    if (opts_.trace)
      m_.trace.push_back({stmt, std::vector<Int>(iv.begin(), iv.end())});
    where_ = {&stmt, iv};
    ArrayState &a = array(st.target.name);
    std::size_t at = index(a, st.target, s);
    Value v = eval(st.value, s);
    if (a.elem == ElemKind::Float64) {
      a.floats[at] = v.as_double();
    } else if (!v.fl) {
      a.ints[at] = v.i;
    } else {
      if (!(v.f >= -9223372036854775808.0 && v.f < 9223372036854775808.0))
        fail(ErrorKind::Execution, "value " + format_double(v.f) +
                                       " does not fit the int array " + a.name + context());
      a.ints[at] = static_cast<Int>(v.f);
    }
    where_ = {};
  }

  // Binds a statement's iterators to `args` and runs its body.
  void call(const ir::StmtDef &def, std::span<const Int> args) {
    if (def.iterators.size() != args.size())
      fail(ErrorKind::Malformed, "call @" + def.name + ": expected " +
                                     std::to_string(def.iterators.size()) + " operands");
    assign(def.body, def.name, Scope{def.iterators, args}, args);
  }

private:
  ArrayState &array(const std::string &name) {
    auto it = cache_.find(name);
    if (it != cache_.end())
      return *it->second;
    ArrayState *a = m_.find_array(name);
    if (!a)
      fail(ErrorKind::Execution, "access to unknown array " + name + context());
    cache_.emplace(name, a);
    return *a;
  }

  std::string context() const {
    if (!where_.stmt)
      return "";
    return " in " + *where_.stmt + "(" + join(where_.iv) + ")";
  }

  std::size_t index(const ArrayState &a, const Expr &ref, const Scope &s) {
    if (ref.operands.size() != a.shape.size())
      fail(ErrorKind::Execution, "array " + a.name + " indexed with " +
                                     std::to_string(ref.operands.size()) + " subscripts" +
                                     context());
    std::vector<Int> idx;
    for (const Expr &sub : ref.operands)
      idx.push_back(eval_int(sub, s));
    std::size_t flat = 0;
    for (std::size_t k = 0; k < idx.size(); ++k) {
      if (idx[k] < 0 || idx[k] >= a.shape[k]) {
        std::string shape;
        for (std::size_t d = 0; d < a.shape.size(); ++d)
          shape += (d ? "x" : "") + std::to_string(a.shape[d]);
        std::string sub;
        for (Int i : idx)
          sub += "[" + std::to_string(i) + "]";
        fail(ErrorKind::Execution,
             "out-of-bounds access " + a.name + sub + " (shape " + shape + ")" + context());
      }
      flat = flat * static_cast<std::size_t>(a.shape[k]) + static_cast<std::size_t>(idx[k]);
    }
    return flat;
  }

  struct Where {
    const std::string *stmt = nullptr;
    std::span<const Int> iv;
  };

  Machine &m_;
  const RunOptions &opts_;
  std::mt19937_64 rng_;
  std::uint64_t steps_ = 0;
  std::unordered_map<std::string, ArrayState *> cache_;
  Where where_;
};

std::vector<std::pair<std::string, Int>> bind_symbols(const std::vector<std::string> &names,
                                                      const RunOptions &o) {
  std::vector<std::pair<std::string, Int>> out;
  for (const std::string &n : names) {
    auto it = o.symbols.find(n);
    if (it == o.symbols.end())
      fail(ErrorKind::Execution, "unbound symbol " + n);
    out.emplace_back(n, it->second);
  }
  return out;
}

void merge_symbols(Machine &m, const std::vector<std::string> &names, const RunOptions &o) {
  for (auto &b : bind_symbols(names, o))
    if (std::none_of(m.symbols.begin(), m.symbols.end(),
                     [&](const auto &x) { return x.first == b.first; }))
      m.symbols.push_back(b);
}

void add_array(Machine &m, ArrayState a, const RunOptions &o) {
  if (m.find_array(a.name))
    return;
  auto it = o.init.find(a.name);
  if (it != o.init.end())
    load_text(a, it->second);
  m.arrays.push_back(std::move(a));
}

std::vector<Int> values(const std::vector<std::pair<std::string, Int>> &syms,
                        const std::vector<std::string> &names) {
  std::vector<Int> out;
  for (const std::string &n : names)
    for (const auto &[k, v] : syms)
      if (k == n)
        out.push_back(v);
  return out;
}

template <class T> void shuffle_range(std::vector<T> &v, std::mt19937_64 &rng) {
  std::shuffle(v.begin(), v.end(), rng);
}

//===----------------------------------------------------------------------===//
// Source programs
//===----------------------------------------------------------------------===//

struct SourceRun {
  Exec &ex;
  std::vector<std::string> names;
  std::vector<Int> vals;

  Scope scope() const { return {names, vals}; }

  bool holds(const frontend::Condition &c) {
    Value a = ex.eval(c.lhs, scope()), b = ex.eval(c.rhs, scope());
    auto cmp = [&](auto x, auto y) {
      switch (c.op) {
      case frontend::CmpOp::Lt:
        return x < y;
      case frontend::CmpOp::Le:
        return x <= y;
      case frontend::CmpOp::Gt:
        return x > y;
      case frontend::CmpOp::Ge:
        return x >= y;
      case frontend::CmpOp::Eq:
        return x == y;
      }
      return false;
    };
    if (a.fl || b.fl)
      return cmp(a.as_double(), b.as_double());
    return cmp(a.i, b.i);
  }

  void block(const std::vector<frontend::Stmt> &b) {
    for (const frontend::Stmt &s : b) {
      if (const auto *f = std::get_if<frontend::ForStmt>(&s.node)) {
        Int lo = ex.eval_int(f->lower, scope());
        Int hi = ex.eval_int(f->upper, scope());
        if (!f->inclusive)
          hi = checked::sub(hi, 1);
        names.push_back(f->var);
        vals.push_back(lo);
        for (Int i = lo; i <= hi; ++i) {
          ex.step();
          vals.back() = i;
          block(f->body);
        }
        names.pop_back();
        vals.pop_back();
      } else if (const auto *i = std::get_if<frontend::IfStmt>(&s.node)) {
        bool ok = std::all_of(i->conds.begin(), i->conds.end(),
                              [&](const frontend::Condition &c) { return holds(c); });
        block(ok ? i->then_body : i->else_body);
      } else if (const auto *a = std::get_if<frontend::AssignStmt>(&s.node)) {
        ex.assign(*a, a->label, scope(), vals);
      }
    }
  }
};

//===----------------------------------------------------------------------===//
// Affine IR
//===----------------------------------------------------------------------===//

struct IrRun {
  Exec &ex;
  const ir::Module &m;
  std::vector<Int> syms;
  std::vector<Int> dims;

  void block(const ir::Block &b) {
    for (const ir::Op &op : b) {
      if (const auto *f = std::get_if<ir::ForOp>(&op.node)) {
        if (f->lower.empty() || f->upper.empty())
          fail(ErrorKind::Malformed, "affine.for %" + f->var + " has an empty bound");
        Int lo = f->lower.front().evaluate(dims, syms);
        for (const affine::AffineExpr &e : f->lower)
          lo = std::max(lo, e.evaluate(dims, syms));
        Int hi = f->upper.front().evaluate(dims, syms);
        for (const affine::AffineExpr &e : f->upper)
          hi = std::min(hi, e.evaluate(dims, syms));
        dims.push_back(lo);
        if (f->parallel && ex.shuffling() && lo <= hi) {
          std::vector<Int> order;
          for (Int i = lo; i <= hi; ++i)
            order.push_back(i);
          shuffle_range(order, ex.rng());
          for (Int i : order) {
            ex.step();
            dims.back() = i;
            block(f->body);
          }
        } else {
          for (Int i = lo; i <= hi; ++i) {
            ex.step();
            dims.back() = i;
            block(f->body);
          }
        }
        dims.pop_back();
      } else if (const auto *i = std::get_if<ir::IfOp>(&op.node)) {
        block(i->cond.contains(dims, syms) ? i->then_body : i->else_body);
      } else {
        const auto &c = std::get<ir::CallOp>(op.node);
        const ir::StmtDef *def = m.find_statement(c.callee);
        if (!def)
          fail(ErrorKind::Malformed, "call to undefined statement @" + c.callee);
        std::vector<Int> args;
        for (const affine::AffineExpr &e : c.operands)
          args.push_back(e.evaluate(dims, syms));
        ex.call(*def, args);
      }
    }
  }
};

//===----------------------------------------------------------------------===//
// Loop programs
//===----------------------------------------------------------------------===//

struct LoopRun {
  Exec &ex;
  const hls::LoopProgram &p;
  std::vector<std::pair<std::string, Int>> env;

  bool holds(const hls::LCond &c) {
    Int v = hls::evaluate(c.expr, env);
    return c.equality ? v == 0 : v >= 0;
  }

  void block(const hls::LBlock &b) {
    for (const hls::LStmt &s : b) {
      if (const auto *f = std::get_if<hls::LFor>(&s.node)) {
        Int lo = hls::evaluate(f->lower, env);
        Int hi = hls::evaluate(f->upper, env);
        env.emplace_back(f->var, lo);
        std::size_t slot = env.size() - 1;
        if (f->parallel && ex.shuffling() && lo <= hi) {
          std::vector<Int> order;
          for (Int i = lo; i <= hi; ++i)
            order.push_back(i);
          shuffle_range(order, ex.rng());
          for (Int i : order) {
            ex.step();
            env[slot].second = i;
            block(f->body);
          }
        } else {
          for (Int i = lo; i <= hi; ++i) {
            ex.step();
            env[slot].second = i;
            block(f->body);
          }
        }
        env.pop_back();
      } else if (const auto *i = std::get_if<hls::LIf>(&s.node)) {
        bool ok = std::all_of(i->conds.begin(), i->conds.end(),
                              [&](const hls::LCond &c) { return holds(c); });
        block(ok ? i->then_body : i->else_body);
      } else {
        const auto &c = std::get<hls::LCall>(s.node);
        const ir::StmtDef *def = p.find_statement(c.callee);
        if (!def)
          fail(ErrorKind::Malformed, "call to undefined statement " + c.callee);
        std::vector<Int> args;
        for (const hls::IExpr &e : c.args)
          args.push_back(hls::evaluate(e, env));
        ex.call(*def, args);
      }
    }
  }
};

std::vector<Int> loop_shape(const hls::LArray &a,
                            const std::vector<std::pair<std::string, Int>> &syms) {
  std::vector<Int> shape;
  for (const hls::IExpr &e : a.extents)
    shape.push_back(hls::evaluate(e, syms));
  return shape;
}

void run_kernel(Machine &m, const hls::LoopProgram &p, const RunOptions &opts) {
  Exec ex(m, opts);
  LoopRun r{ex, p, bind_symbols(p.symbols, opts)};
  r.block(p.body);
}

} // namespace

//===----------------------------------------------------------------------===//
// Entry points
//===----------------------------------------------------------------------===//

Machine run(const frontend::Program &p, const RunOptions &opts) {
  Machine m;
  m.symbols = bind_symbols(p.symbols, opts);
  Exec ex(m, opts);
  for (const frontend::ArrayDecl &d : p.arrays) {
    std::vector<Int> shape;
    for (const Expr &e : d.extents)
      shape.push_back(ex.eval_int(e, {}));
    add_array(m, make_array(d.name, d.elem, shape), opts);
  }
  SourceRun r{ex, {}, {}};
  r.block(p.body);
  return m;
}

Machine run(const std::vector<scop::Scop> &scops, const RunOptions &opts) {
  Machine m;
  for (const scop::Scop &s : scops) {
    merge_symbols(m, s.symbols, opts);
    std::vector<Int> syms = values(m.symbols, s.symbols);
    for (const scop::ArrayInfo &a : s.arrays)
      add_array(m, make_array(a.name, a.elem, s.array_shape(a, syms)), opts);
  }
  Exec ex(m, opts);
  for (const scop::Scop &s : scops) {
    std::vector<Int> syms = values(m.symbols, s.symbols);
    if (!s.context.contains(std::vector<Int>{}, syms))
      fail(ErrorKind::InvalidArgument, "symbol values violate the context of " + s.name);
    struct Inst {
      std::vector<Int> time;
      std::size_t stmt;
      std::vector<Int> point;
    };
    std::vector<Inst> insts;
    for (std::size_t k = 0; k < s.statements.size(); ++k) {
      const scop::PolyStmt &st = s.statements[k];
      for (std::vector<Int> &x : affine::enumerate_points(st.domain.intersect(st.guard), syms)) {
        ex.step();
        insts.push_back({st.schedule.evaluate(x, syms), k, std::move(x)});
      }
    }
    std::stable_sort(insts.begin(), insts.end(), [](const Inst &a, const Inst &b) {
      return a.time != b.time ? a.time < b.time : a.stmt < b.stmt;
    });
    if (ex.shuffling()) {
      // Permute the blocks that differ only from a parallel position on.
      auto order = [&](auto &self, std::size_t lo, std::size_t hi, std::size_t pos) -> void {
        if (hi - lo <= 1 || pos >= insts[lo].time.size())
          return;
        std::vector<std::pair<std::size_t, std::size_t>> groups;
        for (std::size_t k = lo; k < hi;) {
          std::size_t e = k;
          while (e < hi && insts[e].time[pos] == insts[k].time[pos])
            ++e;
          groups.emplace_back(k, e);
          k = e;
        }
        for (auto [a, b] : groups)
          self(self, a, b, pos + 1);
        if (pos < s.parallel.size() && s.parallel[pos] && groups.size() > 1) {
          shuffle_range(groups, ex.rng());
          std::vector<Inst> tmp;
          for (auto [a, b] : groups)
            for (std::size_t k = a; k < b; ++k)
              tmp.push_back(std::move(insts[k]));
          std::move(tmp.begin(), tmp.end(), insts.begin() + static_cast<std::ptrdiff_t>(lo));
        }
      };
      order(order, 0, insts.size(), 0);
    }
    for (const Inst &in : insts) {
      const scop::PolyStmt &st = s.statements[in.stmt];
      std::vector<std::string> its = st.iterators();
      std::span<const Int> iv(in.point.data(), st.depth);
      ex.assign(st.body, st.name, Scope{its, iv}, iv);
    }
  }
  return m;
}

Machine run(const std::vector<ir::Module> &ms, const RunOptions &opts) {
  Machine m;
  for (const ir::Module &mod : ms) {
    merge_symbols(m, mod.symbols, opts);
    std::vector<Int> syms = values(m.symbols, mod.symbols);
    for (const ir::ArrayDef &a : mod.arrays) {
      std::vector<Int> shape;
      for (const affine::AffineExpr &e : a.extents)
        shape.push_back(e.evaluate({}, syms));
      add_array(m, make_array(a.name, a.elem, shape), opts);
    }
  }
  Exec ex(m, opts);
  for (const ir::Module &mod : ms) {
    IrRun r{ex, mod, values(m.symbols, mod.symbols), {}};
    r.block(mod.body);
  }
  return m;
}

Machine run(const std::vector<hls::LoopProgram> &ps, const RunOptions &opts) {
  Machine m;
  for (const hls::LoopProgram &p : ps) {
    merge_symbols(m, p.symbols, opts);
    for (const hls::LArray &a : p.arrays)
      add_array(m, make_array(a.name, a.elem, loop_shape(a, m.symbols)), opts);
  }
  Exec ex(m, opts);
  for (const hls::LoopProgram &p : ps) {
    LoopRun r{ex, p, bind_symbols(p.symbols, opts)};
    r.block(p.body);
  }
  return m;
}

Machine run(const std::vector<hls::HlsProgram> &ps, const RunOptions &opts) {
  Machine host;
  host.symbols = bind_symbols(hls::host_symbols(ps), opts);
  for (const hls::LArray &a : hls::host_arrays(ps))
    add_array(host, make_array(a.name, a.elem, loop_shape(a, host.symbols)), opts);
  for (const hls::HlsProgram &p : ps) {
    Machine dev;
    dev.symbols = host.symbols;
    for (const hls::ArrayTransfer &t : p.transfers) {
      const ArrayState *h = host.find_array(t.array);
      if (!h)
        fail(ErrorKind::Malformed, "transfer of undeclared array " + t.array);
      ArrayState d = make_array(h->name, h->elem, h->shape);
      if (t.kind != hls::Transfer::Out)
        d = *h;
      dev.arrays.push_back(std::move(d));
    }
    run_kernel(dev, p.kernel, opts);
    for (const hls::ArrayTransfer &t : p.transfers)
      if (t.kind != hls::Transfer::In)
        *host.find_array(t.array) = *dev.find_array(t.array);
    for (TraceEntry &e : dev.trace)
      host.trace.push_back(std::move(e));
  }
  return host;
}

std::string dump_arrays(const Machine &m) {
  std::string out;
  for (const ArrayState &a : m.arrays) {
    out += a.name + ":";
    if (a.elem == ElemKind::Int64)
      for (Int v : a.ints)
        out += " " + std::to_string(v);
    else
      for (double v : a.floats)
        out += " " + format_double(v);
    out += '\n';
  }
  return out;
}

std::string dump_trace(const std::vector<TraceEntry> &t) {
  std::string out;
  for (const TraceEntry &e : t)
    out += e.stmt + "(" + join(e.iv) + ")\n";
  return out;
}

std::string compare_arrays(const Machine &a, const Machine &b) {
  for (const ArrayState &y : b.arrays) {
    const ArrayState *x = a.find_array(y.name);
    if (!x)
      return "array " + y.name + " is missing";
    if (x->shape != y.shape || x->elem != y.elem)
      return "array " + y.name + " has a different shape or type";
    for (std::size_t k = 0; k < y.size(); ++k) {
      bool same = y.elem == ElemKind::Int64
                      ? x->ints[k] == y.ints[k]
                      : std::memcmp(&x->floats[k], &y.floats[k], sizeof(double)) == 0;
      if (!same) {
        std::string lhs = y.elem == ElemKind::Int64 ? std::to_string(x->ints[k])
                                                    : format_double(x->floats[k]);
        std::string rhs = y.elem == ElemKind::Int64 ? std::to_string(y.ints[k])
                                                    : format_double(y.floats[k]);
        return "array " + y.name + " differs at flat index " + std::to_string(k) + ": " + lhs +
               " vs " + rhs;
      }
    }
  }
  return "";
}

std::map<std::string, std::string> pattern_init(const frontend::Program &p,
                                                const std::map<std::string, Int> &symbols) {
  RunOptions o;
  o.symbols = symbols;
  Machine m;
  m.symbols = bind_symbols(p.symbols, o);
  Exec ex(m, o);
  std::map<std::string, std::string> out;
  Int salt = 0;
  for (const frontend::ArrayDecl &d : p.arrays) {
    ++salt;
    Int n = 1;
    bool ok = true;
    for (const Expr &e : d.extents) {
      Int v = ex.eval_int(e, {});
      ok = ok && v >= 0;
      n = ok ? checked::mul(n, v) : 0;
    }
    if (!ok)
      continue;
    std::string text;
    for (Int k = 0; k < n; ++k) {
      Int r = (k * 7 + salt * 13 + 3) % 29 - 14;
      text += (k ? " " : "");
      text += d.elem == ElemKind::Int64 ? std::to_string(r) : format_double(double(r) / 8.0);
    }
    out[d.name] = std::move(text);
  }
  return out;
}

} // namespace polyhls::interp
