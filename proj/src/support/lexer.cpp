//===- lexer.cpp ----------------------------------------------------------===//

#include "polyhls/support/lexer.hpp"

#include <array>
#include <cctype>
#include <cerrno>
#include <cstdlib>

namespace polyhls {

namespace {

bool is_ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

constexpr std::array<std::string_view, 11> kMultiPunct = {
    "->", ">=", "<=", "==", "!=", "++", "--", "+=", "-=", "&&", "||"};

class Scanner {
public:
  explicit Scanner(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space_and_comments();
      if (pos_ >= src_.size()) {
        Token end;
        end.loc = loc();
        out.push_back(end);
        return out;
      }
      out.push_back(scan_one());
    }
  }

private:
  SourceLoc loc() const { return {line_, col_}; }

  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space_and_comments() {
    for (;;) {
      while (pos_ < src_.size() &&
             std::isspace(static_cast<unsigned char>(peek())))
        advance();
      if (peek() == '/' && peek(1) == '/') {
        while (pos_ < src_.size() && peek() != '\n')
          advance();
        continue;
      }
      if (peek() == '/' && peek(1) == '*') {
        SourceLoc start = loc();
        advance();
        advance();
        while (pos_ < src_.size() && !(peek() == '*' && peek(1) == '/'))
          advance();
        if (pos_ >= src_.size())
          throw Error(ErrorKind::Syntax, start, "unterminated comment");
        advance();
        advance();
        continue;
      }
      return;
    }
  }

  Token scan_one() {
    Token tok;
    tok.loc = loc();
    char c = peek();
    std::size_t start = pos_;

    if (c == '#' && src_.substr(pos_, 7) == "#pragma" &&
        !is_ident_char(peek(7))) {
      while (pos_ < src_.size() && peek() != '\n')
        advance();
      std::string_view line = src_.substr(start, pos_ - start);
      // Normalize internal whitespace so "#pragma   scop" == "#pragma scop".
      std::string norm;
      bool space = false;
      for (char ch : line) {
        if (std::isspace(static_cast<unsigned char>(ch))) {
          space = !norm.empty();
          continue;
        }
        if (space)
          norm.push_back(' ');
        space = false;
        norm.push_back(ch);
      }
      tok.kind = TokenKind::Pragma;
      tok.text = norm;
      return tok;
    }

    if ((c == '%' || c == '@' || c == '#') &&
        (is_ident_start(peek(1)) || std::isdigit(static_cast<unsigned char>(peek(1))))) {
      advance();
      while (is_ident_char(peek()))
        advance();
      tok.kind = TokenKind::Ident;
      tok.text = std::string(src_.substr(start, pos_ - start));
      return tok;
    }

    if (is_ident_start(c)) {
      while (is_ident_char(peek()))
        advance();
      tok.kind = TokenKind::Ident;
      tok.text = std::string(src_.substr(start, pos_ - start));
      return tok;
    }

    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && std::isdigit(static_cast<unsigned char>(peek(1))))) {
      bool is_float = false;
      while (std::isdigit(static_cast<unsigned char>(peek())))
        advance();
      if (peek() == '.') {
        is_float = true;
        advance();
        while (std::isdigit(static_cast<unsigned char>(peek())))
          advance();
      }
      if (peek() == 'e' || peek() == 'E') {
        std::size_t save = pos_;
        int save_col = col_;
        advance();
        if (peek() == '+' || peek() == '-')
          advance();
        if (std::isdigit(static_cast<unsigned char>(peek()))) {
          is_float = true;
          while (std::isdigit(static_cast<unsigned char>(peek())))
            advance();
        } else {
          pos_ = save;
          col_ = save_col;
        }
      }
      tok.text = std::string(src_.substr(start, pos_ - start));
      errno = 0;
      if (is_float) {
        tok.kind = TokenKind::Float;
        tok.float_value = std::strtod(tok.text.c_str(), nullptr);
      } else {
        tok.kind = TokenKind::Integer;
        tok.int_value = std::strtoll(tok.text.c_str(), nullptr, 10);
      }
      if (errno == ERANGE)
        throw Error(ErrorKind::Syntax, tok.loc,
                    "numeric literal out of range: " + tok.text);
      return tok;
    }

    for (std::string_view p : kMultiPunct) {
      if (src_.substr(pos_, p.size()) == p) {
        for (std::size_t k = 0; k < p.size(); ++k)
          advance();
        tok.kind = TokenKind::Punct;
        tok.text = std::string(p);
        return tok;
      }
    }

    static constexpr std::string_view kSingle = "()[]{}<>,:;=+-*/%!&|.?";
    if (kSingle.find(c) != std::string_view::npos) {
      advance();
      tok.kind = TokenKind::Punct;
      tok.text = std::string(1, c);
      return tok;
    }

    throw Error(ErrorKind::Syntax, tok.loc,
                std::string("unexpected character '") + c + "'");
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

} // namespace

std::vector<Token> tokenize(std::string_view source) {
  return Scanner(source).run();
}

TokenStream::TokenStream(std::vector<Token> tokens) : tokens_(std::move(tokens)) {
  if (tokens_.empty() || tokens_.back().kind != TokenKind::End)
    tokens_.push_back(Token{});
}

const Token &TokenStream::peek(std::size_t ahead) const {
  std::size_t idx = pos_ + ahead;
  return idx < tokens_.size() ? tokens_[idx] : tokens_.back();
}

const Token &TokenStream::next() {
  const Token &tok = peek();
  if (pos_ < tokens_.size() - 1)
    ++pos_;
  return tok;
}

bool TokenStream::is(std::string_view text) const {
  const Token &tok = peek();
  return (tok.kind == TokenKind::Punct || tok.kind == TokenKind::Ident) &&
         tok.text == text;
}

bool TokenStream::accept(std::string_view text) {
  if (!is(text))
    return false;
  next();
  return true;
}

const Token &TokenStream::expect(std::string_view text) {
  if (!is(text)) {
    const Token &tok = peek();
    error_at(tok, "expected '" + std::string(text) + "' but found " +
                      (tok.kind == TokenKind::End ? std::string("end of input")
                                                  : "'" + tok.text + "'"));
  }
  return next();
}

const Token &TokenStream::expect_ident(std::string_view what) {
  if (peek().kind != TokenKind::Ident)
    error("expected " + std::string(what));
  return next();
}

Int TokenStream::expect_integer(std::string_view what) {
  bool negative = false;
  if (is("-")) {
    next();
    negative = true;
  }
  if (peek().kind != TokenKind::Integer)
    error("expected " + std::string(what));
  Int v = next().int_value;
  return negative ? checked::neg(v) : v;
}

void TokenStream::error(const std::string &message) const {
  error_at(peek(), message);
}

void TokenStream::error_at(const Token &tok, const std::string &message) const {
  throw Error(ErrorKind::Syntax, tok.loc, message);
}

} // namespace polyhls
