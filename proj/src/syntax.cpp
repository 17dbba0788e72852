#include "streamwd/syntax.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "streamwd/detail/lexer.hpp"

namespace streamwd {

using detail::Lexer;
using detail::Tok;
using detail::Token;

bool isReservedWord(const std::string& ident) {
  static const std::set<std::string> words = {"sig",  "dvar",        "svar", "datarules",
                                              "streamrules", "goal", "prove", "lemma",
                                              "by",   "cases",       "thus", "qed", "sym"};
  return words.count(ident) > 0;
}

namespace {

bool isNameToken(const Token& t) { return t.kind == Tok::Ident || t.kind == Tok::Number; }

struct SpecParser {
  Lexer lex;
  StreamSpec spec;
  std::set<std::string> dvars;
  std::set<std::string> svars;
  std::set<std::string> declared;  // symbols and variables

  explicit SpecParser(const std::string& text) : lex(text) {}

  [[noreturn]] void fail(const Token& at, const std::string& expected) { lex.fail(at, expected); }

  std::string expectName(const char* what) {
    Token t = lex.peek();
    if (!isNameToken(t)) fail(t, what);
    lex.next();
    return t.text;
  }

  void expect(Tok kind) {
    Token t = lex.peek();
    if (t.kind != kind) fail(t, detail::tokName(kind));
    lex.next();
  }

  bool peekKeyword(const char* kw) {
    const Token& t = lex.peek();
    return t.kind == Tok::Ident && t.text == kw;
  }

  bool atBlockKeyword() {
    const Token& t = lex.peek();
    return t.kind == Tok::Ident &&
           (t.text == "sig" || t.text == "dvar" || t.text == "svar" || t.text == "datarules" ||
            t.text == "streamrules");
  }

  void checkFreshName(const Token& at, const std::string& name) {
    if (isReservedWord(name))
      throw ParseError(at.line, at.col, "'" + name + "' is a reserved word");
    if (name == "head" || name == "tail")
      throw ParseError(at.line, at.col,
                       "'" + name + "' is reserved for the observational construction; "
                       "declare it as '" + name + "0' instead");
    if (declared.count(name))
      throw ParseError(at.line, at.col, "duplicate declaration of '" + name + "'");
    declared.insert(name);
  }

  void parseSigBlock() {
    // sigdecl+ : at least one
    bool any = false;
    while (isNameToken(lex.peek()) && !atBlockKeyword()) {
      Token nameTok = lex.peek();
      std::string name = expectName("symbol name");
      expect(Tok::Colon);
      auto parseSortName = [&]() {
        Token t = lex.peek();
        if (t.kind == Tok::Ident && (t.text == "d" || t.text == "s")) {
          lex.next();
          return t.text == "d" ? Sort::Data : Sort::Stream;
        }
        fail(t, "sort name 'd' or 's'");
      };
      std::vector<Sort> sorts;
      sorts.push_back(parseSortName());
      while (lex.peek().kind == Tok::Ident &&
             (lex.peek().text == "d" || lex.peek().text == "s"))
        sorts.push_back(parseSortName());
      Sort result;
      if (lex.peek().kind == Tok::Arrow) {
        lex.next();
        result = parseSortName();
      } else {
        if (sorts.size() != 1)
          fail(lex.peek(), "'->' before the result sort");
        result = sorts[0];
        sorts.clear();
      }
      expect(Tok::Semi);
      checkFreshName(nameTok, name);
      FunSymbol sym{name, sorts, result};
      if (result == Sort::Data) {
        for (Sort s : sym.argSorts)
          if (s != Sort::Data)
            throw ParseError(nameTok.line, nameTok.col,
                             "data symbol '" + name + "' cannot take stream arguments");
        spec.sigmaD.push_back(sym);
      } else {
        bool seenStream = false;
        for (Sort s : sym.argSorts) {
          if (s == Sort::Stream)
            seenStream = true;
          else if (seenStream)
            throw ParseError(nameTok.line, nameTok.col,
                             "stream symbol '" + name +
                                 "': data arguments must precede stream arguments");
        }
        spec.sigmaS.push_back(sym);
      }
      any = true;
    }
    if (!any) fail(lex.peek(), "signature declaration");
  }

  void parseVarBlock(bool dataVars) {
    bool any = false;
    while (isNameToken(lex.peek())) {
      Token t = lex.peek();
      std::string name = expectName("variable name");
      checkFreshName(t, name);
      (dataVars ? dvars : svars).insert(name);
      any = true;
    }
    if (!any) fail(lex.peek(), "variable name");
    expect(Tok::Semi);
  }

  // term := cons-chain of applications
  Term parseTerm() {
    Term left = parseApp();
    if (lex.peek().kind == Tok::Colon) {
      Token colonTok = lex.peek();
      lex.next();
      Term right = parseTerm();  // right-associative
      if (left.sort() != Sort::Data)
        throw ParseError(colonTok.line, colonTok.col,
                         "left argument of ':' must have sort d, found '" + left.str() + "'");
      if (right.sort() != Sort::Stream)
        throw ParseError(colonTok.line, colonTok.col,
                         "right argument of ':' must have sort s, found '" + right.str() + "'");
      return Term::cons(left, right);
    }
    return left;
  }

  Term parseApp() {
    Token t = lex.peek();
    if (!isNameToken(t)) fail(t, "term");
    std::string name = expectName("term");
    if (lex.peek().kind == Tok::LParen) {
      lex.next();
      std::vector<Term> args;
      if (lex.peek().kind != Tok::RParen) {
        args.push_back(parseTerm());
        while (lex.peek().kind == Tok::Comma) {
          lex.next();
          args.push_back(parseTerm());
        }
      }
      Token closeTok = lex.peek();
      if (closeTok.kind != Tok::RParen) fail(closeTok, "',' or ')'");
      lex.next();
      const FunSymbol* sym = spec.findSymbol(name);
      if (!sym) throw ParseError(t.line, t.col, "undeclared symbol '" + name + "'");
      if (sym->arity() != args.size())
        throw ParseError(t.line, t.col,
                         "'" + name + "' expects " + std::to_string(sym->arity()) +
                             " arguments, got " + std::to_string(args.size()));
      for (std::size_t i = 0; i < args.size(); ++i)
        if (args[i].sort() != sym->argSorts[i])
          throw ParseError(t.line, t.col, "argument " + std::to_string(i + 1) + " of '" + name +
                                              "' must have sort " +
                                              std::string(to_string(sym->argSorts[i])));
      return Term::apply(*sym, std::move(args));
    }
    if (dvars.count(name)) return Term::variable(name, Sort::Data);
    if (svars.count(name)) return Term::variable(name, Sort::Stream);
    const FunSymbol* sym = spec.findSymbol(name);
    if (!sym) throw ParseError(t.line, t.col, "undeclared symbol or variable '" + name + "'");
    if (sym->arity() != 0)
      throw ParseError(t.line, t.col, "'" + name + "' expects " +
                                          std::to_string(sym->arity()) + " arguments");
    return Term::apply(*sym);
  }

  void parseRuleBlock(bool dataRules) {
    bool any = false;
    while (isNameToken(lex.peek()) && !atBlockKeyword()) {
      Token startTok = lex.peek();
      Term lhs = parseTerm();
      expect(Tok::Equal);
      Term rhs = parseTerm();
      expect(Tok::Semi);
      Sort want = dataRules ? Sort::Data : Sort::Stream;
      if (lhs.sort() != want || rhs.sort() != want)
        throw ParseError(startTok.line, startTok.col,
                         std::string(dataRules ? "data" : "stream") + " rule must have sort " +
                             to_string(want));
      try {
        Rule r(lhs, rhs);
        (dataRules ? spec.rd : spec.rs).push_back(std::move(r));
      } catch (const Error& e) {
        throw ParseError(startTok.line, startTok.col, e.what());
      }
      any = true;
    }
    if (!any) fail(lex.peek(), "rule");
  }

  StreamSpec run() {
    if (lex.atEnd()) fail(lex.peek(), "a 'sig', 'dvar', 'svar', 'datarules' or 'streamrules' block");
    while (!lex.atEnd()) {
      Token t = lex.peek();
      if (t.kind != Tok::Ident) fail(t, "a block keyword");
      if (t.text == "sig") {
        lex.next();
        parseSigBlock();
      } else if (t.text == "dvar") {
        lex.next();
        parseVarBlock(true);
      } else if (t.text == "svar") {
        lex.next();
        parseVarBlock(false);
      } else if (t.text == "datarules") {
        lex.next();
        parseRuleBlock(true);
      } else if (t.text == "streamrules") {
        lex.next();
        parseRuleBlock(false);
      } else {
        fail(t, "a block keyword ('sig', 'dvar', 'svar', 'datarules', 'streamrules')");
      }
    }
    return spec;
  }
};

}  // namespace

StreamSpec parseSpec(const std::string& text) { return SpecParser(text).run(); }

StreamSpec parseSpecFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Usage, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parseSpec(ss.str());
}

// ---------------------------------------------------------------------------
// Rendering

namespace {

std::string renderTerm(const Term& t, const std::map<std::string, std::string>& symRenames) {
  if (t.isVariable()) return t.varName();
  if (t.symbol() == consSymbol())
    return renderTerm(t.args()[0], symRenames) + " : " + renderTerm(t.args()[1], symRenames);
  std::string name = t.symbol().name;
  auto it = symRenames.find(name);
  if (it != symRenames.end()) name = it->second;
  if (t.args().empty()) return name;
  std::string out = name + "(";
  for (std::size_t i = 0; i < t.args().size(); ++i) {
    if (i) out += ", ";
    out += renderTerm(t.args()[i], symRenames);
  }
  return out + ")";
}

}  // namespace

RenderResult renderSpec(const StreamSpec& spec) {
  RenderResult res;
  std::map<std::string, std::string> renames;

  std::set<std::string> taken;
  for (const FunSymbol& s : spec.sigmaD) taken.insert(s.name);
  for (const FunSymbol& s : spec.sigmaS) taken.insert(s.name);

  auto escape = [&](const std::string& name) {
    std::string fresh = name + "_";
    while (taken.count(fresh)) fresh += "_";
    taken.insert(fresh);
    renames[name] = fresh;
    res.warnings.push_back("symbol '" + name + "' rendered as '" + fresh + "'");
  };
  for (const FunSymbol& s : spec.sigmaD)
    if (s.name == "cons") escape(s.name);
  for (const FunSymbol& s : spec.sigmaS)
    if (s.name == "cons") escape(s.name);

  std::ostringstream os;
  os << "sig\n";
  auto declName = [&](const std::string& n) {
    auto it = renames.find(n);
    return it == renames.end() ? n : it->second;
  };
  auto printDecl = [&](const FunSymbol& s) {
    os << "  " << declName(s.name) << " :";
    for (Sort a : s.argSorts) os << " " << to_string(a);
    if (!s.argSorts.empty()) os << " ->";
    os << " " << to_string(s.resultSort) << " ;\n";
  };
  for (const FunSymbol& s : spec.sigmaD) printDecl(s);
  for (const FunSymbol& s : spec.sigmaS) printDecl(s);

  std::set<std::string> dv, sv;
  auto collectRuleVars = [&](const Rule& r) {
    for (const Var& v : r.lhs.vars()) (v.sort == Sort::Data ? dv : sv).insert(v.name);
    for (const Var& v : r.rhs.vars()) (v.sort == Sort::Data ? dv : sv).insert(v.name);
  };
  for (const Rule& r : spec.rd) collectRuleVars(r);
  for (const Rule& r : spec.rs) collectRuleVars(r);
  if (!dv.empty()) {
    os << "dvar";
    for (const std::string& v : dv) os << " " << v;
    os << " ;\n";
  }
  if (!sv.empty()) {
    os << "svar";
    for (const std::string& v : sv) os << " " << v;
    os << " ;\n";
  }

  if (!spec.rd.empty()) {
    os << "datarules\n";
    for (const Rule& r : spec.rd)
      os << "  " << renderTerm(r.lhs, renames) << " = " << renderTerm(r.rhs, renames) << " ;\n";
  }
  if (!spec.rs.empty()) {
    os << "streamrules\n";
    for (const Rule& r : spec.rs)
      os << "  " << renderTerm(r.lhs, renames) << " = " << renderTerm(r.rhs, renames) << " ;\n";
  }
  res.text = os.str();
  return res;
}

Term parseTerm(const StreamSpec& spec, const std::string& text) {
  SpecParser p(text + " ;");
  p.spec = spec;
  Term t = p.parseTerm();
  if (p.lex.peek().kind != Tok::Semi) p.fail(p.lex.peek(), "end of term");
  return t;
}

}  // namespace streamwd
