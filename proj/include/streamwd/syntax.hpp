#pragma once

// Concrete textual language for stream specifications.
//
//   file      := block+
//   block     := "sig" sigdecl+ | "dvar" ident+ ";" | "svar" ident+ ";"
//              | "datarules" rule+ | "streamrules" rule+
//   sigdecl   := ident ":" sorts ";"          e.g.  zip : s s -> s ;   0 : d ;
//   sorts     := (sortname+ "->")? sortname   sortname := "d" | "s"
//   rule      := term "=" term ";"
//   term      := ident | ident "(" term ("," term)* ")" | term ":" term
//
// ':' is right-associative; application binds tighter than ':'.
// Comments run from '#' to end of line. `head` and `tail` are reserved for
// the observational construction and rejected in user signatures.

#include <optional>
#include <string>
#include <vector>

#include "streamwd/spec.hpp"
#include "streamwd/term.hpp"

namespace streamwd {

class ParseError : public Error {
 public:
  ParseError(int line, int col, std::string msg)
      : Error(ErrorCode::BadTerm, "line " + std::to_string(line) + ":" + std::to_string(col) +
                                      ": " + msg),
        line_(line),
        col_(col) {}
  int line() const { return line_; }
  int col() const { return col_; }

 private:
  int line_;
  int col_;
};

StreamSpec parseSpec(const std::string& text);
StreamSpec parseSpecFile(const std::string& path);

struct RenderResult {
  std::string text;
  std::vector<std::string> warnings;
};

// Canonical text that re-parses to an identical spec. A user symbol named
// `cons` is escaped to `cons_` (with a warning) so the text stays loadable by
// TPDB-oriented tooling.
RenderResult renderSpec(const StreamSpec& spec);

// Parses a ground term over the spec's signature (CLI input; identifiers that
// are not declared symbols are rejected).
Term parseTerm(const StreamSpec& spec, const std::string& text);

bool isReservedWord(const std::string& ident);

}  // namespace streamwd
