//===- lexer.hpp - Shared tokenizer -----------------------------*- C++ -*-===//
//
// One tokenizer serves the poly-C front end, the affine map/set syntax and the
// Affine IR text format. Identifiers may carry a leading sigil (%, @, #) as
// used by the IR; `#pragma ...` lines become a single Pragma token.
//
//===----------------------------------------------------------------------===//

#pragma once

#include "polyhls/support/checked.hpp"
#include "polyhls/support/error.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace polyhls {

enum class TokenKind { End, Ident, Integer, Float, Pragma, Punct };

struct Token {
  TokenKind kind = TokenKind::End;
  std::string text;
  SourceLoc loc;
  Int int_value = 0;
  double float_value = 0.0;
};

std::vector<Token> tokenize(std::string_view source);

/// Cursor over a token vector with the usual peek/accept/expect helpers.
class TokenStream {
public:
  explicit TokenStream(std::vector<Token> tokens);
  explicit TokenStream(std::string_view source)
      : TokenStream(tokenize(source)) {}

  const Token &peek(std::size_t ahead = 0) const;
  const Token &next();
  bool at_end() const { return peek().kind == TokenKind::End; }
  std::size_t position() const { return pos_; }
  void rewind(std::size_t pos) { pos_ = pos; }

  bool is(std::string_view punct_or_ident) const;
  bool accept(std::string_view punct_or_ident);
  const Token &expect(std::string_view punct_or_ident);
  const Token &expect_ident(std::string_view what);
  Int expect_integer(std::string_view what);

  [[noreturn]] void error(const std::string &message) const;
  [[noreturn]] void error_at(const Token &tok, const std::string &message) const;

private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

} // namespace polyhls
