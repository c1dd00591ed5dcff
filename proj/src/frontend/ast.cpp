//===- ast.cpp - AST construction, equality and printing ------------------===//

#include "polyhls/frontend/ast.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstring>

namespace polyhls::frontend {

const char *to_string(ElemKind kind) {
  return kind == ElemKind::Int64 ? "int" : "float";
}

const char *to_string(CmpOp op) {
  switch (op) {
  case CmpOp::Lt:
    return "<";
  case CmpOp::Le:
    return "<=";
  case CmpOp::Gt:
    return ">";
  case CmpOp::Ge:
    return ">=";
  case CmpOp::Eq:
    return "==";
  }
  return "?";
}

Expr Expr::integer(Int v, SourceLoc loc) {
  Expr e;
  e.kind = ExprKind::IntLit;
  e.int_value = v;
  e.loc = loc;
  return e;
}

Expr Expr::floating(double v, SourceLoc loc) {
  Expr e;
  e.kind = ExprKind::FloatLit;
  e.float_value = v;
  e.loc = loc;
  return e;
}

Expr Expr::var(std::string name, SourceLoc loc) {
  Expr e;
  e.kind = ExprKind::Var;
  e.name = std::move(name);
  e.loc = loc;
  return e;
}

Expr Expr::array(std::string name, std::vector<Expr> subscripts, SourceLoc loc) {
  Expr e;
  e.kind = ExprKind::ArrayRef;
  e.name = std::move(name);
  e.operands = std::move(subscripts);
  e.loc = loc;
  return e;
}

Expr Expr::unary(ExprKind kind, Expr operand, SourceLoc loc) {
  Expr e;
  e.kind = kind;
  e.operands.push_back(std::move(operand));
  e.loc = loc;
  return e;
}

Expr Expr::binary(ExprKind kind, Expr lhs, Expr rhs, SourceLoc loc) {
  Expr e;
  e.kind = kind;
  e.operands.push_back(std::move(lhs));
  e.operands.push_back(std::move(rhs));
  e.loc = loc;
  return e;
}

bool operator==(const Expr &a, const Expr &b) {
  if (a.kind != b.kind)
    return false;
  switch (a.kind) {
  case ExprKind::IntLit:
    return a.int_value == b.int_value;
  case ExprKind::FloatLit:
    return std::bit_cast<std::uint64_t>(a.float_value) ==
           std::bit_cast<std::uint64_t>(b.float_value);
  case ExprKind::Var:
    return a.name == b.name;
  case ExprKind::ArrayRef:
    return a.name == b.name && a.operands == b.operands;
  default:
    return a.operands == b.operands;
  }
}

bool operator==(const ForStmt &a, const ForStmt &b) {
  return a.var == b.var && a.lower == b.lower && a.upper == b.upper &&
         a.inclusive == b.inclusive && a.body == b.body;
}

bool operator==(const IfStmt &a, const IfStmt &b) {
  return a.conds == b.conds && a.then_body == b.then_body && a.else_body == b.else_body;
}

bool operator==(const AssignStmt &a, const AssignStmt &b) {
  return a.label == b.label && a.target == b.target && a.value == b.value;
}

bool operator==(const ScopMarker &a, const ScopMarker &b) { return a.begin == b.begin; }

bool operator==(const Stmt &a, const Stmt &b) { return a.node == b.node; }

const ArrayDecl *Program::find_array(std::string_view name) const {
  for (const ArrayDecl &a : arrays)
    if (a.name == name)
      return &a;
  return nullptr;
}

bool Program::is_symbol(std::string_view name) const {
  return std::find(symbols.begin(), symbols.end(), name) != symbols.end();
}

namespace {

int precedence(ExprKind k) {
  switch (k) {
  case ExprKind::Add:
  case ExprKind::Sub:
    return 1;
  case ExprKind::Mul:
    return 2;
  case ExprKind::Neg:
    return 3;
  default:
    return 4;
  }
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, res.ptr);
  if (s.find_first_of(".eEn") == std::string::npos)
    s += ".0";
  return s;
}

void print_into(std::string &out, const Expr &e, bool compact) {
  auto child = [&](const Expr &c, bool paren) {
    if (paren)
      out += "(";
    print_into(out, c, compact);
    if (paren)
      out += ")";
  };
  switch (e.kind) {
  case ExprKind::IntLit:
    out += std::to_string(e.int_value);
    return;
  case ExprKind::FloatLit:
    out += format_double(e.float_value);
    return;
  case ExprKind::Var:
    out += e.name;
    return;
  case ExprKind::ArrayRef:
    out += e.name;
    for (const Expr &s : e.operands) {
      out += "[";
      print_into(out, s, true);
      out += "]";
    }
    return;
  case ExprKind::Neg:
    out += "-";
    child(e.operands[0], precedence(e.operands[0].kind) <= precedence(ExprKind::Neg));
    return;
  default: {
    int p = precedence(e.kind);
    const char *op = e.kind == ExprKind::Add ? "+" : e.kind == ExprKind::Sub ? "-" : "*";
    child(e.operands[0], precedence(e.operands[0].kind) < p);
    if (compact)
      out += op;
    else
      out += std::string(" ") + op + " ";
    // A negated right operand is parenthesized so "a - -1" never prints as "a--1".
    child(e.operands[1], precedence(e.operands[1].kind) <= p ||
                             e.operands[1].kind == ExprKind::Neg);
    return;
  }
  }
}

void indent(std::string &out, int depth) { out.append(static_cast<std::size_t>(depth) * 2, ' '); }

void print_stmts(std::string &out, const std::vector<Stmt> &stmts, int depth);

void print_body(std::string &out, const std::vector<Stmt> &body, int depth) {
  bool single = body.size() == 1 && !std::holds_alternative<ScopMarker>(body[0].node) &&
                !std::holds_alternative<IfStmt>(body[0].node);
  if (single) {
    out += "\n";
    print_stmts(out, body, depth + 1);
    return;
  }
  out += " {\n";
  print_stmts(out, body, depth + 1);
  indent(out, depth);
  out += "}\n";
}

void print_stmts(std::string &out, const std::vector<Stmt> &stmts, int depth) {
  for (const Stmt &s : stmts) {
    if (const auto *m = std::get_if<ScopMarker>(&s.node)) {
      out += m->begin ? "#pragma scop\n" : "#pragma endscop\n";
      continue;
    }
    indent(out, depth);
    if (const auto *f = std::get_if<ForStmt>(&s.node)) {
      out += "for (" + f->var + " = " + print_expr(f->lower) + "; " + f->var +
             (f->inclusive ? " <= " : " < ") + print_expr(f->upper) + "; " + f->var + "++)";
      print_body(out, f->body, depth);
    } else if (const auto *i = std::get_if<IfStmt>(&s.node)) {
      out += "if (";
      for (std::size_t k = 0; k < i->conds.size(); ++k) {
        if (k)
          out += " && ";
        out += print_expr(i->conds[k].lhs) + " " + to_string(i->conds[k].op) + " " +
               print_expr(i->conds[k].rhs);
      }
      out += ") {\n";
      print_stmts(out, i->then_body, depth + 1);
      indent(out, depth);
      out += "}";
      if (!i->else_body.empty()) {
        out += " else {\n";
        print_stmts(out, i->else_body, depth + 1);
        indent(out, depth);
        out += "}";
      }
      out += "\n";
    } else {
      const auto &a = std::get<AssignStmt>(s.node);
      out += a.label + ": " + print_expr(a.target) + " = " + print_expr(a.value) + ";\n";
    }
  }
}

} // namespace

std::string print_expr(const Expr &e, bool compact) {
  std::string out;
  print_into(out, e, compact);
  return out;
}

std::string print_program(const Program &p) {
  std::string out;
  if (!p.symbols.empty()) {
    out += "int ";
    for (std::size_t i = 0; i < p.symbols.size(); ++i)
      out += (i ? ", " : "") + p.symbols[i];
    out += ";\n";
  }
  for (const ArrayDecl &a : p.arrays) {
    out += std::string(to_string(a.elem)) + " " + a.name;
    for (const Expr &e : a.extents)
      out += "[" + print_expr(e, true) + "]";
    out += ";\n";
  }
  if (!p.body.empty()) {
    if (!out.empty())
      out += "\n";
    print_stmts(out, p.body, 0);
  }
  return out;
}

} // namespace polyhls::frontend
