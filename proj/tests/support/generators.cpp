#include "support/generators.hpp"

namespace testing {

using namespace polyhls::frontend;

namespace {

struct Gen {
  std::mt19937_64 &rng;
  std::vector<std::string> loops;
  int label = 0;
  bool modelable = false;

  int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
  bool chance(double p) { return std::bernoulli_distribution(p)(rng); }

  Expr index_expr(int depth = 0) {
    int k = pick(0, depth > 1 ? 2 : 5);
    if (k == 0)
      return Expr::integer(pick(0, 9));
    if (k == 1 || loops.empty())
      return Expr::var(chance(0.5) ? "N" : "M");
    if (k == 2)
      return Expr::var(loops[static_cast<std::size_t>(pick(0, static_cast<int>(loops.size()) - 1))]);
    if (k == 3)
      return Expr::binary(chance(0.5) ? ExprKind::Add : ExprKind::Sub, index_expr(depth + 1),
                          index_expr(depth + 1));
    if (k == 4)
      return Expr::binary(ExprKind::Mul, Expr::integer(pick(1, 4)), index_expr(depth + 1));
    return Expr::unary(ExprKind::Neg, index_expr(depth + 1));
  }

  Expr value_expr(int depth = 0) {
    int k = pick(0, depth > 2 ? 2 : 6);
    switch (k) {
    case 0:
      return Expr::floating(pick(0, 40) / 8.0);
    case 1:
      return Expr::array("A", {index_expr(), index_expr()});
    case 2:
      return Expr::array("C", {index_expr()});
    case 3:
      return Expr::binary(ExprKind::Add, value_expr(depth + 1), value_expr(depth + 1));
    case 4:
      return Expr::binary(ExprKind::Sub, value_expr(depth + 1), value_expr(depth + 1));
    case 5:
      return Expr::binary(ExprKind::Mul, value_expr(depth + 1), value_expr(depth + 1));
    default:
      return Expr::unary(ExprKind::Neg, value_expr(depth + 1));
    }
  }

  Stmt assign() {
    AssignStmt a;
    a.label = "S" + std::to_string(++label);
    if (chance(0.5)) {
      a.target = Expr::array("A", {index_expr(), index_expr()});
      a.value = value_expr();
    } else {
      a.target = Expr::array("B", {index_expr()});
      a.value = Expr::binary(ExprKind::Add, Expr::array("B", {index_expr()}), index_expr());
    }
    return Stmt{std::move(a), {}};
  }

  std::vector<Stmt> block(int depth) {
    std::vector<Stmt> out;
    int n = pick(1, 3);
    for (int i = 0; i < n; ++i) {
      int k = depth >= 3 ? 0 : pick(0, 3);
      if (k == 0) {
        out.push_back(assign());
      } else if (k == 3) {
        IfStmt s;
        int nc = pick(1, 2);
        for (int c = 0; c < nc; ++c)
          s.conds.push_back({index_expr(), static_cast<CmpOp>(pick(0, 4)), index_expr()});
        s.then_body = block(depth + 1);
        bool convex_else = s.conds.size() == 1 && s.conds[0].op != CmpOp::Eq;
        if ((!modelable || convex_else) && chance(0.3))
          s.else_body = block(depth + 1);
        out.push_back(Stmt{std::move(s), {}});
      } else {
        ForStmt f;
        f.var = "i" + std::to_string(loops.size());
        f.lower = index_expr();
        f.upper = index_expr();
        f.inclusive = chance(0.5);
        loops.push_back(f.var);
        f.body = block(depth + 1);
        loops.pop_back();
        out.push_back(Stmt{std::move(f), {}});
      }
    }
    return out;
  }
};

} // namespace

Program random_program(std::mt19937_64 &rng, bool modelable) {
  Gen g{rng, {}, 0, modelable};
  Program p;
  p.symbols = {"N", "M"};
  p.arrays.push_back({"A", ElemKind::Float64, {Expr::var("N"), Expr::var("M")}, {}});
  p.arrays.push_back({"B", ElemKind::Int64,
                      {Expr::binary(ExprKind::Add, Expr::var("N"), Expr::integer(1))}, {}});
  p.arrays.push_back({"C", ElemKind::Float64, {Expr::integer(16)}, {}});
  p.body.push_back(Stmt{ScopMarker{true}, {}});
  for (Stmt &s : g.block(0))
    p.body.push_back(std::move(s));
  p.body.push_back(Stmt{ScopMarker{false}, {}});
  return p;
}

} // namespace testing

namespace testing {

using polyhls::affine::AffineExpr;
using polyhls::affine::IntegerSet;
using namespace polyhls::ir;

namespace {

struct ModuleGen {
  std::mt19937_64 &rng;
  unsigned depth = 0;
  int loops = 0;
  std::vector<StmtDef> *stmts = nullptr;

  int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
  bool chance(double p) { return std::bernoulli_distribution(p)(rng); }

  AffineExpr linear() {
    AffineExpr e(pick(-5, 5));
    for (unsigned d = 0; d < depth; ++d)
      if (chance(0.4))
        e += AffineExpr::dim(d) * pick(-3, 3);
    for (unsigned s = 0; s < 2; ++s)
      if (chance(0.3))
        e += AffineExpr::symbol(s) * pick(-2, 2);
    return e;
  }

  AffineExpr expr() {
    int k = pick(0, 5);
    if (k == 0)
      return linear().floor_div(pick(1, 8));
    if (k == 1)
      return linear().ceil_div(pick(2, 8)) + pick(-2, 2);
    if (k == 2)
      return linear().mod(pick(2, 5));
    return linear();
  }

  std::vector<AffineExpr> bound() {
    std::vector<AffineExpr> out;
    int n = pick(1, 3);
    for (int k = 0; k < n; ++k)
      out.push_back(chance(0.3) ? AffineExpr(pick(-3, 40)) : expr());
    return out;
  }

  IntegerSet condition() {
    IntegerSet s(depth, 2);
    if (chance(0.2))
      s.append_exists(1);
    int n = pick(1, 3);
    for (int k = 0; k < n; ++k) {
      AffineExpr e = linear();
      for (unsigned x = 0; x < s.num_exists(); ++x)
        e += AffineExpr::dim(depth + x) * pick(-3, 3);
      if (chance(0.2))
        s.add_equality(e);
      else
        s.add_inequality(e);
    }
    return s;
  }

  Block block(int level) {
    Block out;
    int n = pick(1, 3);
    for (int k = 0; k < n; ++k) {
      int kind = level >= 4 ? 2 : pick(0, 3);
      if (kind == 0 || kind == 3) {
        ForOp f;
        f.var = "t" + std::to_string(++loops);
        f.lower = bound();
        f.upper = bound();
        f.parallel = chance(0.3);
        ++depth;
        f.body = block(level + 1);
        --depth;
        out.push_back(Op{std::move(f)});
      } else if (kind == 1) {
        IfOp i;
        i.cond = condition();
        i.then_body = block(level + 1);
        if (chance(0.4))
          i.else_body = block(level + 1);
        out.push_back(Op{std::move(i)});
      } else {
        const StmtDef &s = (*stmts)[static_cast<std::size_t>(pick(0, int(stmts->size()) - 1))];
        CallOp c;
        c.callee = s.name;
        for (std::size_t a = 0; a < s.iterators.size(); ++a)
          c.operands.push_back(chance(0.7) ? linear() : expr());
        out.push_back(Op{std::move(c)});
      }
    }
    return out;
  }
};

StmtDef random_stmt(std::mt19937_64 &rng, const std::string &name, int arity) {
  std::vector<std::string> its;
  for (int k = 0; k < arity; ++k)
    its.push_back(std::string(1, char('i' + k)));
  auto iter = [&](int k) { return Expr::var(its[static_cast<std::size_t>(k)]); };
  auto sub = [&](int k) {
    if (arity == 0)
      return Expr::integer(k);
    return Expr::binary(ExprKind::Add, iter(k % arity), Expr::integer(k));
  };
  StmtDef s;
  s.name = name;
  s.iterators = its;
  s.body.label = name;
  bool two_d = std::bernoulli_distribution(0.5)(rng);
  s.body.target = two_d ? Expr::array("A", {sub(0), sub(1)}) : Expr::array("B", {sub(1)});
  s.body.value = Expr::binary(ExprKind::Mul, Expr::array("A", {sub(1), sub(2)}),
                              Expr::floating(0.5));
  if (arity > 0)
    s.body.value = Expr::binary(ExprKind::Sub, std::move(s.body.value), Expr::var("N"));
  return s;
}

} // namespace

Module random_module(std::mt19937_64 &rng) {
  Module m;
  m.name = "scop0";
  m.symbols = {"N", "M"};
  m.arrays.push_back({"A", ElemKind::Float64, {AffineExpr::symbol(0), AffineExpr::symbol(1) + 2}});
  m.arrays.push_back({"B", ElemKind::Int64, {AffineExpr(64)}});
  int n = std::uniform_int_distribution<int>(1, 3)(rng);
  for (int k = 0; k < n; ++k)
    m.statements.push_back(random_stmt(rng, "S" + std::to_string(k + 1),
                                       std::uniform_int_distribution<int>(0, 3)(rng)));
  ModuleGen g{rng};
  g.stmts = &m.statements;
  m.body = g.block(0);
  return m;
}

} // namespace testing
