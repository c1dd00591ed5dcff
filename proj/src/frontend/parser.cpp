//===- parser.cpp - poly-C recursive-descent parser -----------------------===//

#include "polyhls/frontend/ast.hpp"
#include "polyhls/support/lexer.hpp"

#include <algorithm>
#include <set>

namespace polyhls::frontend {

namespace {

const std::set<std::string, std::less<>> kUnsupportedKeywords = {
    "while", "do",    "goto",   "switch", "return", "break",  "continue", "case",
    "struct", "union", "typedef", "double", "char",  "long",   "short",    "unsigned",
    "void",  "const", "static", "sizeof"};

[[noreturn]] void unsupported(const Token &tok, const std::string &what) {
  throw Error(ErrorKind::Unsupported, tok.loc, "unsupported construct: " + what);
}

class Parser {
public:
  explicit Parser(std::string_view src) : own_(src), ts_(own_) {}
  Parser(TokenStream &ts, Program decls, std::vector<std::string> loops)
      : own_(std::vector<Token>{}), ts_(ts), prog_(std::move(decls)), loops_(std::move(loops)) {}

  AssignStmt single_assignment() {
    std::vector<Stmt> out;
    assignment(out);
    return std::get<AssignStmt>(std::move(out.front().node));
  }

  Program run() {
    while (!ts_.at_end()) {
      const Token &tok = ts_.peek();
      if (tok.kind == TokenKind::Ident && (tok.text == "int" || tok.text == "float")) {
        if (in_scop_)
          unsupported(tok, "declaration inside a scop region");
        declaration();
        continue;
      }
      statement(prog_.body);
    }
    if (in_scop_)
      throw Error(ErrorKind::Syntax, scop_loc_, "'#pragma scop' without matching '#pragma endscop'");
    return std::move(prog_);
  }

private:
  void declaration() {
    const Token &type = ts_.next();
    ElemKind elem = type.text == "int" ? ElemKind::Int64 : ElemKind::Float64;
    if (ts_.is("*"))
      unsupported(ts_.peek(), "pointer declaration");
    do {
      const Token &name = ts_.expect_ident("a declared name");
      check_fresh(name);
      if (!ts_.is("[")) {
        if (elem != ElemKind::Int64)
          unsupported(name, "scalar float variable '" + name.text + "'");
        if (ts_.is("="))
          unsupported(ts_.peek(), "initialized scalar '" + name.text + "'");
        prog_.symbols.push_back(name.text);
        continue;
      }
      ArrayDecl decl;
      decl.name = name.text;
      decl.elem = elem;
      decl.loc = name.loc;
      while (ts_.accept("[")) {
        Expr extent = expr(Context::Extent);
        ts_.expect("]");
        decl.extents.push_back(std::move(extent));
      }
      prog_.arrays.push_back(std::move(decl));
    } while (ts_.accept(","));
    ts_.expect(";");
  }

  void check_fresh(const Token &name) {
    if (prog_.is_symbol(name.text) || prog_.find_array(name.text))
      throw Error(ErrorKind::Syntax, name.loc, "redeclaration of '" + name.text + "'");
    if (is_keyword(name.text))
      throw Error(ErrorKind::Syntax, name.loc, "'" + name.text + "' is a reserved word");
  }

  static bool is_keyword(std::string_view s) {
    return s == "for" || s == "if" || s == "else" || s == "int" || s == "float" ||
           kUnsupportedKeywords.count(s) != 0;
  }

  void statement(std::vector<Stmt> &out) {
    const Token &tok = ts_.peek();
    if (tok.kind == TokenKind::Pragma) {
      pragma(out);
      return;
    }
    if (tok.kind == TokenKind::Ident && kUnsupportedKeywords.count(tok.text))
      unsupported(tok, "'" + tok.text + "' statement");
    if (tok.kind == TokenKind::Ident && (tok.text == "int" || tok.text == "float"))
      unsupported(tok, "declaration inside a statement body");
    if (ts_.is("{")) {
      ts_.next();
      while (!ts_.is("}")) {
        if (ts_.at_end())
          ts_.error("expected '}' before end of input");
        statement(out);
      }
      ts_.next();
      return;
    }
    if (ts_.is(";")) {
      ts_.next();
      return;
    }
    if (ts_.is("*") || ts_.is("&"))
      unsupported(tok, "pointer operation");
    if (tok.kind == TokenKind::Ident && tok.text == "for") {
      for_stmt(out);
      return;
    }
    if (tok.kind == TokenKind::Ident && tok.text == "if") {
      if_stmt(out);
      return;
    }
    if (tok.kind == TokenKind::Ident && tok.text == "else")
      ts_.error("'else' without a matching 'if'");
    if (tok.kind == TokenKind::Ident) {
      assignment(out);
      return;
    }
    ts_.error("expected a statement, found '" + tok.text + "'");
  }

  void pragma(std::vector<Stmt> &out) {
    const Token &tok = ts_.next();
    Stmt s;
    s.loc = tok.loc;
    if (tok.text == "#pragma scop") {
      if (in_scop_)
        throw Error(ErrorKind::Unsupported, tok.loc,
                    "nested '#pragma scop' (already inside the scop opened at " +
                        scop_loc_.str() + ")");
      if (depth_ != 0)
        unsupported(tok, "'#pragma scop' inside a loop or branch");
      in_scop_ = true;
      scop_loc_ = tok.loc;
      s.node = ScopMarker{true};
    } else if (tok.text == "#pragma endscop") {
      if (!in_scop_)
        throw Error(ErrorKind::Syntax, tok.loc, "'#pragma endscop' without '#pragma scop'");
      if (depth_ != 0)
        unsupported(tok, "'#pragma endscop' inside a loop or branch");
      in_scop_ = false;
      s.node = ScopMarker{false};
    } else {
      unsupported(tok, "pragma '" + tok.text + "'");
    }
    out.push_back(std::move(s));
  }

  std::vector<Stmt> body() {
    std::vector<Stmt> out;
    ++depth_;
    statement(out);
    --depth_;
    return out;
  }

  void for_stmt(std::vector<Stmt> &out) {
    Stmt s;
    s.loc = ts_.next().loc;
    ForStmt f;
    ts_.expect("(");
    if (ts_.is("int"))
      ts_.next();
    const Token &var = ts_.expect_ident("a loop variable");
    if (prog_.is_symbol(var.text) || prog_.find_array(var.text) || is_keyword(var.text))
      throw Error(ErrorKind::Syntax, var.loc,
                  "loop variable '" + var.text + "' clashes with a declaration");
    if (std::find(loops_.begin(), loops_.end(), var.text) != loops_.end())
      throw Error(ErrorKind::Syntax, var.loc,
                  "loop variable '" + var.text + "' shadows an enclosing loop");
    f.var = var.text;
    ts_.expect("=");
    f.lower = expr(Context::Bound);
    ts_.expect(";");
    const Token &cv = ts_.expect_ident("the loop variable");
    if (cv.text != f.var)
      unsupported(cv, "loop condition on '" + cv.text + "' instead of '" + f.var + "'");
    if (ts_.accept("<")) {
      f.inclusive = false;
    } else if (ts_.accept("<=")) {
      f.inclusive = true;
    } else {
      unsupported(ts_.peek(), "loop condition '" + ts_.peek().text +
                                  "' (only '<' and '<=' are supported)");
    }
    f.upper = expr(Context::Bound);
    ts_.expect(";");
    increment(f.var);
    ts_.expect(")");
    loops_.push_back(f.var);
    f.body = body();
    loops_.pop_back();
    s.node = std::move(f);
    out.push_back(std::move(s));
  }

  void increment(const std::string &var) {
    const Token &start = ts_.peek();
    auto non_unit = [&] { unsupported(start, "non-unit loop step"); };
    if (ts_.accept("++")) {
      if (ts_.expect_ident("the loop variable").text != var)
        non_unit();
      return;
    }
    const Token &v = ts_.expect_ident("the loop increment");
    if (v.text != var)
      unsupported(v, "increment of '" + v.text + "' instead of '" + var + "'");
    if (ts_.accept("++"))
      return;
    if (ts_.accept("--"))
      non_unit();
    if (ts_.accept("+=")) {
      if (ts_.peek().kind != TokenKind::Integer || ts_.next().int_value != 1)
        non_unit();
      return;
    }
    if (ts_.accept("=")) {
      const Token &again = ts_.expect_ident("the loop variable");
      if (again.text != var || !ts_.accept("+") || ts_.peek().kind != TokenKind::Integer ||
          ts_.next().int_value != 1)
        non_unit();
      return;
    }
    non_unit();
  }

  void if_stmt(std::vector<Stmt> &out) {
    Stmt s;
    s.loc = ts_.next().loc;
    IfStmt node;
    ts_.expect("(");
    conjunction(node.conds);
    ts_.expect(")");
    node.then_body = body();
    if (ts_.accept("else"))
      node.else_body = body();
    s.node = std::move(node);
    out.push_back(std::move(s));
  }

  void conjunction(std::vector<Condition> &conds) {
    do {
      comparison(conds);
    } while (ts_.accept("&&"));
    if (ts_.is("||"))
      unsupported(ts_.peek(), "'||' in a condition");
  }

  void comparison(std::vector<Condition> &conds) {
    if (ts_.is("!"))
      unsupported(ts_.peek(), "'!' in a condition");
    if (ts_.is("(")) {
      // Either a parenthesized condition or an expression starting with '('.
      std::size_t save = ts_.position();
      ts_.next();
      try {
        std::vector<Condition> inner;
        conjunction(inner);
        if (ts_.accept(")") && (ts_.is("&&") || ts_.is(")"))) {
          conds.insert(conds.end(), inner.begin(), inner.end());
          return;
        }
      } catch (const Error &) {
      }
      ts_.rewind(save);
    }
    Condition c;
    c.lhs = expr(Context::Bound);
    const Token &op = ts_.next();
    if (op.text == "<")
      c.op = CmpOp::Lt;
    else if (op.text == "<=")
      c.op = CmpOp::Le;
    else if (op.text == ">")
      c.op = CmpOp::Gt;
    else if (op.text == ">=")
      c.op = CmpOp::Ge;
    else if (op.text == "==")
      c.op = CmpOp::Eq;
    else if (op.text == "!=")
      unsupported(op, "'!=' in a condition");
    else
      ts_.error_at(op, "expected a comparison operator, found '" + op.text + "'");
    c.rhs = expr(Context::Bound);
    conds.push_back(std::move(c));
  }

  void assignment(std::vector<Stmt> &out) {
    Stmt s;
    s.loc = ts_.peek().loc;
    AssignStmt a;
    ++ordinal_;
    if (ts_.peek(1).kind == TokenKind::Punct && ts_.peek(1).text == ":") {
      const Token &label = ts_.next();
      if (prog_.is_symbol(label.text) || prog_.find_array(label.text))
        throw Error(ErrorKind::Syntax, label.loc,
                    "label '" + label.text + "' clashes with a declaration");
      a.label = label.text;
      ts_.next();
    } else {
      a.label = "S" + std::to_string(ordinal_);
    }
    if (!labels_.insert(a.label).second)
      throw Error(ErrorKind::Syntax, s.loc, "duplicate statement label '" + a.label + "'");

    const Token &name = ts_.expect_ident("an array name");
    const ArrayDecl *decl = prog_.find_array(name.text);
    if (!decl) {
      if (prog_.is_symbol(name.text) ||
          std::find(loops_.begin(), loops_.end(), name.text) != loops_.end())
        unsupported(name, "assignment to scalar '" + name.text + "'");
      throw Error(ErrorKind::UnknownReference, name.loc,
                  "assignment to undeclared array '" + name.text + "'");
    }
    a.target = array_ref(name, *decl);
    const Token &op = ts_.next();
    if (op.text == "=") {
      a.value = expr(Context::Value);
    } else if (op.text == "+=" || op.text == "-=" ||
               (op.text == "*" && ts_.is("="))) {
      ExprKind k = op.text == "+=" ? ExprKind::Add : op.text == "-=" ? ExprKind::Sub
                                                                     : ExprKind::Mul;
      if (op.text == "*")
        ts_.next();
      Expr value = expr(Context::Value);
      a.value = Expr::binary(k, a.target, std::move(value), op.loc);
    } else if (op.text == "++" || op.text == "--") {
      unsupported(op, "increment of an array element");
    } else {
      ts_.error_at(op, "expected '=' in assignment, found '" + op.text + "'");
    }
    ts_.expect(";");
    s.node = std::move(a);
    out.push_back(std::move(s));
  }

  enum class Context { Extent, Bound, Value };

  Expr array_ref(const Token &name, const ArrayDecl &decl) {
    std::vector<Expr> subs;
    while (ts_.accept("[")) {
      subs.push_back(expr(Context::Bound));
      ts_.expect("]");
    }
    if (subs.size() != decl.extents.size())
      throw Error(ErrorKind::Syntax, name.loc,
                  "array '" + name.text + "' has " + std::to_string(decl.extents.size()) +
                      " dimension(s) but is indexed with " + std::to_string(subs.size()));
    return Expr::array(name.text, std::move(subs), name.loc);
  }

  Expr expr(Context ctx) {
    Expr e = product(ctx);
    for (;;) {
      if (ts_.is("+") || ts_.is("-")) {
        const Token &op = ts_.next();
        Expr rhs = product(ctx);
        e = Expr::binary(op.text == "+" ? ExprKind::Add : ExprKind::Sub, std::move(e),
                         std::move(rhs), op.loc);
      } else {
        return e;
      }
    }
  }

  Expr product(Context ctx) {
    Expr e = unary(ctx);
    for (;;) {
      if (ts_.is("*") && !(ts_.peek(1).kind == TokenKind::Punct && ts_.peek(1).text == "=")) {
        const Token &op = ts_.next();
        Expr rhs = unary(ctx);
        e = Expr::binary(ExprKind::Mul, std::move(e), std::move(rhs), op.loc);
      } else if (ts_.is("/") || ts_.is("%")) {
        unsupported(ts_.peek(), "'" + ts_.peek().text + "' operator");
      } else {
        return e;
      }
    }
  }

  Expr unary(Context ctx) {
    if (ts_.is("-")) {
      const Token &op = ts_.next();
      return Expr::unary(ExprKind::Neg, unary(ctx), op.loc);
    }
    if (ts_.accept("+"))
      return unary(ctx);
    if (ts_.is("*") || ts_.is("&"))
      unsupported(ts_.peek(), "pointer operation");
    return primary(ctx);
  }

  Expr primary(Context ctx) {
    const Token &tok = ts_.peek();
    switch (tok.kind) {
    case TokenKind::Integer:
      ts_.next();
      return Expr::integer(tok.int_value, tok.loc);
    case TokenKind::Float:
      if (ctx != Context::Value)
        throw Error(ErrorKind::Syntax, tok.loc, "floating-point literal in an integer context");
      ts_.next();
      return Expr::floating(tok.float_value, tok.loc);
    case TokenKind::Ident:
      break;
    default:
      if (ts_.accept("(")) {
        if (ts_.is("int") || ts_.is("float"))
          unsupported(tok, "type cast");
        Expr e = expr(ctx);
        ts_.expect(")");
        return e;
      }
      ts_.error("expected an expression, found " +
                (tok.kind == TokenKind::End ? std::string("end of input") : "'" + tok.text + "'"));
    }

    ts_.next();
    if (ts_.is("("))
      unsupported(tok, "function call '" + tok.text + "'");
    if (const ArrayDecl *decl = prog_.find_array(tok.text)) {
      if (ctx == Context::Extent)
        throw Error(ErrorKind::Syntax, tok.loc, "array reference in an array extent");
      return array_ref(tok, *decl);
    }
    if (ts_.is("["))
      throw Error(ErrorKind::UnknownReference, tok.loc, "undeclared array '" + tok.text + "'");
    bool is_loop = std::find(loops_.begin(), loops_.end(), tok.text) != loops_.end();
    if (prog_.is_symbol(tok.text) || (is_loop && ctx != Context::Extent))
      return Expr::var(tok.text, tok.loc);
    throw Error(ErrorKind::UnknownReference, tok.loc, "undeclared identifier '" + tok.text + "'");
  }

  TokenStream own_;
  TokenStream &ts_;
  Program prog_;
  std::vector<std::string> loops_;
  std::set<std::string> labels_;
  int ordinal_ = 0;
  int depth_ = 0;
  bool in_scop_ = false;
  SourceLoc scop_loc_;
};

} // namespace

Program parse_program(std::string_view source) { return Parser(source).run(); }

AssignStmt parse_assignment(TokenStream &ts, const Program &decls,
                            const std::vector<std::string> &iterators) {
  Program p;
  p.symbols = decls.symbols;
  p.arrays = decls.arrays;
  return Parser(ts, std::move(p), iterators).single_assignment();
}

} // namespace polyhls::frontend
