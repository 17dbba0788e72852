#pragma once

// Shared tokenizer for the spec, goals and proof-script file formats.
// '#' starts a comment running to end of line.

#include <string>
#include <vector>

#include "streamwd/syntax.hpp"

namespace streamwd::detail {

enum class Tok {
  Ident,    // [A-Za-z_][A-Za-z0-9_']*
  Number,   // digits
  LParen,
  RParen,
  LBrace,
  RBrace,
  Comma,
  Semi,
  Colon,
  Equal,      // =
  EqEq,       // ==
  Assign,     // :=
  Arrow,      // ->
  Tilde,      // ~
  Dot,        // .
  Minus,      // -
  End,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  int line = 1;
  int col = 1;
};

class Lexer {
 public:
  explicit Lexer(const std::string& text);

  const Token& peek(std::size_t ahead = 0) const;
  Token next();
  bool atEnd() const { return peek().kind == Tok::End; }

  [[noreturn]] void fail(const Token& at, const std::string& expected) const;

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

const char* tokName(Tok t);

}  // namespace streamwd::detail
