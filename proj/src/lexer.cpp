#include "streamwd/detail/lexer.hpp"

#include <cctype>

namespace streamwd::detail {

const char* tokName(Tok t) {
  switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::Number: return "number";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::Comma: return "','";
    case Tok::Semi: return "';'";
    case Tok::Colon: return "':'";
    case Tok::Equal: return "'='";
    case Tok::EqEq: return "'=='";
    case Tok::Assign: return "':='";
    case Tok::Arrow: return "'->'";
    case Tok::Tilde: return "'~'";
    case Tok::Dot: return "'.'";
    case Tok::Minus: return "'-'";
    case Tok::End: return "end of input";
  }
  return "?";
}

Lexer::Lexer(const std::string& text) {
  int line = 1, col = 1;
  std::size_t i = 0;
  auto push = [&](Tok kind, std::string s, int l, int c) {
    tokens_.push_back(Token{kind, std::move(s), l, c});
  };
  while (i < text.size()) {
    char ch = text[i];
    if (ch == '\n') {
      ++line;
      col = 1;
      ++i;
      continue;
    }
    if (ch == '#') {
      while (i < text.size() && text[i] != '\n') ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(ch))) {
      ++col;
      ++i;
      continue;
    }
    int l = line, c = col;
    auto two = [&](char a, char b) {
      return ch == a && i + 1 < text.size() && text[i + 1] == b;
    };
    if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
      std::size_t j = i;
      while (j < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_' ||
              text[j] == '\''))
        ++j;
      push(Tok::Ident, text.substr(i, j - i), l, c);
      col += static_cast<int>(j - i);
      i = j;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(ch))) {
      std::size_t j = i;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      // A number followed by ident characters is an identifier like `0x`?
      // No: identifiers must not start with a digit, so this is a Number.
      push(Tok::Number, text.substr(i, j - i), l, c);
      col += static_cast<int>(j - i);
      i = j;
      continue;
    }
    if (two(':', '=')) { push(Tok::Assign, ":=", l, c); i += 2; col += 2; continue; }
    if (two('=', '=')) { push(Tok::EqEq, "==", l, c); i += 2; col += 2; continue; }
    if (two('-', '>')) { push(Tok::Arrow, "->", l, c); i += 2; col += 2; continue; }
    switch (ch) {
      case '(': push(Tok::LParen, "(", l, c); break;
      case ')': push(Tok::RParen, ")", l, c); break;
      case '{': push(Tok::LBrace, "{", l, c); break;
      case '}': push(Tok::RBrace, "}", l, c); break;
      case ',': push(Tok::Comma, ",", l, c); break;
      case ';': push(Tok::Semi, ";", l, c); break;
      case ':': push(Tok::Colon, ":", l, c); break;
      case '=': push(Tok::Equal, "=", l, c); break;
      case '~': push(Tok::Tilde, "~", l, c); break;
      case '.': push(Tok::Dot, ".", l, c); break;
      case '-': push(Tok::Minus, "-", l, c); break;
      default:
        throw ParseError(l, c, std::string("unexpected character '") + ch + "'");
    }
    ++i;
    ++col;
  }
  tokens_.push_back(Token{Tok::End, "", line, col});
}

const Token& Lexer::peek(std::size_t ahead) const {
  std::size_t idx = pos_ + ahead;
  if (idx >= tokens_.size()) idx = tokens_.size() - 1;
  return tokens_[idx];
}

Token Lexer::next() {
  Token t = peek();
  if (pos_ + 1 < tokens_.size()) ++pos_;
  return t;
}

void Lexer::fail(const Token& at, const std::string& expected) const {
  throw ParseError(at.line, at.col,
                   "expected " + expected + ", found " +
                       (at.kind == Tok::End ? "end of input" : "'" + at.text + "'"));
}

}  // namespace streamwd::detail
