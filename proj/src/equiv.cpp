#include "streamwd/equiv.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "streamwd/detail/lexer.hpp"
#include "streamwd/engine.hpp"
#include "streamwd/syntax.hpp"

namespace streamwd {

using detail::Lexer;
using detail::Tok;
using detail::Token;

bool valid(const ProofResult& r) { return std::holds_alternative<ProofValid>(r); }

std::string describe(const ProofResult& r) {
  if (valid(r)) return "valid";
  const ProofInvalid& i = std::get<ProofInvalid>(r);
  return "invalid at " + i.location + ": " + i.reason;
}

std::optional<FunSymbol> detectTailSymbol(const StreamSpec& spec) {
  for (const Rule& r : spec.rs) {
    const Term& l = r.lhs;
    if (l.isVariable() || l.args().size() != 1) continue;
    const Term& arg = l.args()[0];
    if (arg.isVariable() || arg.symbol() != consSymbol()) continue;
    if (!arg.args()[0].isVariable() || !arg.args()[1].isVariable()) continue;
    if (r.rhs.isVariable() && r.rhs.var() == arg.args()[1].var() &&
        l.symbol().resultSort == Sort::Stream)
      return l.symbol();
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

std::vector<int> parsePosition(Lexer& lex) {
  Token t = lex.peek();
  if (t.kind == Tok::Ident && t.text == "e") {
    lex.next();
    return {};
  }
  std::vector<int> pos;
  if (t.kind != Tok::Number) lex.fail(t, "a position ('e' or 1.2.1)");
  pos.push_back(std::stoi(lex.next().text));
  while (lex.peek().kind == Tok::Dot) {
    lex.next();
    Token n = lex.peek();
    if (n.kind != Tok::Number) lex.fail(n, "a position index");
    pos.push_back(std::stoi(lex.next().text));
  }
  return pos;
}

struct ProofParser {
  const StreamSpec& spec;
  Lexer lex;

  ProofParser(const StreamSpec& s, const std::string& text) : spec(s), lex(text) {}

  std::vector<NamedBinding> parseWith(std::map<std::string, Sort>& varSorts) {
    std::vector<NamedBinding> out;
    if (!(lex.peek().kind == Tok::Ident && lex.peek().text == "with")) return out;
    lex.next();
    if (lex.peek().kind != Tok::LBrace) lex.fail(lex.peek(), "'{'");
    lex.next();
    while (lex.peek().kind != Tok::RBrace) {
      Token nameTok = lex.peek();
      if (nameTok.kind != Tok::Ident && nameTok.kind != Tok::Number)
        lex.fail(nameTok, "a variable name");
      lex.next();
      if (lex.peek().kind != Tok::Assign) lex.fail(lex.peek(), "':='");
      lex.next();
      Term value = parseGoalTerm(spec, lex, varSorts, std::nullopt);
      out.push_back({nameTok.text, value});
      if (lex.peek().kind == Tok::Comma) {
        lex.next();
        continue;
      }
      if (lex.peek().kind != Tok::RBrace) lex.fail(lex.peek(), "',' or '}'");
    }
    lex.next();  // }
    return out;
  }

  StepDir parseDir() {
    Token t = lex.peek();
    if (t.kind == Tok::Ident && t.text == "fwd") {
      lex.next();
      return StepDir::Fwd;
    }
    if (t.kind == Tok::Ident && t.text == "bwd") {
      lex.next();
      return StepDir::Bwd;
    }
    lex.fail(t, "'fwd' or 'bwd'");
  }

  std::string parseRuleName() {
    Token t = lex.peek();
    if (t.kind != Tok::Ident && t.kind != Tok::Number) lex.fail(t, "a rule name like f.1");
    lex.next();
    std::string name = t.text;
    if (lex.peek().kind != Tok::Dot) lex.fail(lex.peek(), "'.' in rule name");
    lex.next();
    Token k = lex.peek();
    if (k.kind != Tok::Number) lex.fail(k, "a rule ordinal");
    lex.next();
    return name + "." + k.text;
  }

  Step parseStep(std::map<std::string, Sort>& varSorts) {
    Token t = lex.peek();
    if (t.kind == Tok::Ident && t.text == "by") {
      lex.next();
      Token what = lex.peek();
      if (what.kind != Tok::Ident && what.kind != Tok::Number) lex.fail(what, "a justification");
      if (what.text == "eq") {
        lex.next();
        EqStep s;
        s.ruleName = parseRuleName();
        s.dir = parseDir();
        expectKeyword("at");
        s.position = parsePosition(lex);
        s.bindings = parseWith(varSorts);
        expectSemi();
        return Step{s};
      }
      if (what.text == "E1" || what.text == "E2" || what.text == "E3") {
        lex.next();
        EStep s;
        s.which = what.text[1] - '0';
        s.dir = parseDir();
        expectKeyword("at");
        s.position = parsePosition(lex);
        s.bindings = parseWith(varSorts);
        expectSemi();
        return Step{s};
      }
      if (what.text == "lemma") {
        lex.next();
        Token nameTok = lex.peek();
        if (nameTok.kind != Tok::Ident) lex.fail(nameTok, "a lemma name");
        lex.next();
        LemmaStep s;
        s.lemmaName = nameTok.text;
        s.dir = parseDir();
        expectKeyword("at");
        s.position = parsePosition(lex);
        s.bindings = parseWith(varSorts);
        expectSemi();
        return Step{s};
      }
      lex.fail(what, "'eq', 'E1', 'E2', 'E3' or 'lemma'");
    }
    if (t.kind == Tok::Ident && t.text == "cases") {
      lex.next();
      CaseSplit s;
      Token varTok = lex.peek();
      if (varTok.kind != Tok::Ident) lex.fail(varTok, "a data variable");
      lex.next();
      if (lex.peek().kind == Tok::Colon) {
        lex.next();
        s.explicitFromTo = true;
        s.from = parseGoalTerm(spec, lex, varSorts, std::nullopt);
        if (lex.peek().kind != Tok::Tilde) lex.fail(lex.peek(), "'~'");
        lex.next();
        s.to = parseGoalTerm(spec, lex, varSorts, s.from.sort());
      }
      if (lex.peek().kind == Tok::Ident && lex.peek().text == "at") {
        lex.next();
        s.position = parsePosition(lex);
      }
      s.bindings = parseWith(varSorts);
      auto it = varSorts.find(varTok.text);
      if (it != varSorts.end() && it->second != Sort::Data)
        throw ParseError(varTok.line, varTok.col, "case variable must have sort d");
      s.variable = Var{varTok.text, Sort::Data};
      varSorts[varTok.text] = Sort::Data;
      if (lex.peek().kind != Tok::LBrace) lex.fail(lex.peek(), "'{'");
      lex.next();
      while (lex.peek().kind != Tok::RBrace) {
        CaseBranch br;
        std::map<std::string, Sort> labelScope;  // labels are ground
        br.label = parseGoalTerm(spec, lex, labelScope, Sort::Data);
        if (!br.label.isGround())
          throw ParseError(lex.peek().line, lex.peek().col, "case label must be ground");
        if (lex.peek().kind != Tok::Colon) lex.fail(lex.peek(), "':' after case label");
        lex.next();
        if (lex.peek().kind != Tok::LBrace) lex.fail(lex.peek(), "'{'");
        lex.next();
        while (lex.peek().kind != Tok::RBrace) br.steps.push_back(parseStep(varSorts));
        lex.next();  // }
        s.branches.push_back(std::move(br));
      }
      lex.next();  // }
      expectSemi();
      return Step{s};
    }
    if (t.kind == Tok::Ident && t.text == "thus") {
      lex.next();
      Thus s;
      s.term = parseGoalTerm(spec, lex, varSorts, std::nullopt);
      expectSemi();
      return Step{s};
    }
    if (t.kind == Tok::Ident && t.text == "sym") {
      lex.next();
      expectSemi();
      return Step{SymMarker{}};
    }
    lex.fail(t, "'by', 'cases', 'thus', 'sym' or 'qed'");
  }

  void expectKeyword(const char* kw) {
    Token t = lex.peek();
    if (t.kind != Tok::Ident || t.text != kw) lex.fail(t, std::string("'") + kw + "'");
    lex.next();
  }

  void expectSemi() {
    if (lex.peek().kind != Tok::Semi) lex.fail(lex.peek(), "';'");
    lex.next();
  }

  ProofScript parseScript(bool isLemma) {
    ProofScript script;
    if (isLemma) {
      Token nameTok = lex.peek();
      if (nameTok.kind != Tok::Ident) lex.fail(nameTok, "a lemma name");
      lex.next();
      script.name = nameTok.text;
      if (lex.peek().kind != Tok::Colon) lex.fail(lex.peek(), "':'");
      lex.next();
    }
    std::map<std::string, Sort> varSorts;
    script.goalLhs = parseGoalTerm(spec, lex, varSorts, std::nullopt);
    if (lex.peek().kind != Tok::Tilde) lex.fail(lex.peek(), "'~'");
    lex.next();
    script.goalRhs = parseGoalTerm(spec, lex, varSorts, script.goalLhs.sort());
    expectSemi();
    while (!(lex.peek().kind == Tok::Ident && lex.peek().text == "qed"))
      script.steps.push_back(parseStep(varSorts));
    lex.next();  // qed
    expectSemi();
    return script;
  }

  ProofFile run() {
    ProofFile file;
    while (!lex.atEnd()) {
      Token t = lex.peek();
      if (t.kind == Tok::Ident && t.text == "lemma") {
        lex.next();
        file.lemmas.push_back(parseScript(true));
      } else if (t.kind == Tok::Ident && t.text == "prove") {
        lex.next();
        file.proofs.push_back(parseScript(false));
      } else {
        lex.fail(t, "'lemma' or 'prove'");
      }
    }
    return file;
  }
};

}  // namespace

ProofFile parseProofFile(const StreamSpec& spec, const std::string& text) {
  return ProofParser(spec, text).run();
}

ProofFile parseProofFileAt(const StreamSpec& spec, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Usage, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parseProofFile(spec, ss.str());
}

// ---------------------------------------------------------------------------
// Checking

namespace {

struct Equation {
  Term lhs;
  Term rhs;
  std::string display;
};

struct CheckContext {
  const StreamSpec& spec;
  const std::vector<ProofScript>& lemmas;
  const DataUniverse& universe;
  std::optional<FunSymbol> tailSym;

  std::optional<Equation> equationFor(const EqStep& s) const {
    auto found = spec.findRule(s.ruleName);
    if (!found) return std::nullopt;
    const Rule& r = found->first ? spec.rd[found->second] : spec.rs[found->second];
    return Equation{r.lhs, r.rhs, s.ruleName};
  }

  std::optional<Equation> equationForE(int which, std::string& error) const {
    if (!tailSym) {
      error = "E-steps need the tail equation: add a rule like tail0(x : s) = s "
              "to the stream rules";
      return std::nullopt;
    }
    Term x = Term::variable("x@E", Sort::Data);
    Term s = Term::variable("s@E", Sort::Stream);
    Term xs = Term::cons(x, s);
    switch (which) {
      case 1: return Equation{Term::apply(headSymbol(), {xs}), x, "E1"};
      case 2: return Equation{Term::apply(*tailSym, {xs}), s, "E2"};
      case 3:
        return Equation{s,
                        Term::cons(Term::apply(headSymbol(), {s}), Term::apply(*tailSym, {s})),
                        "E3"};
    }
    error = "no such E equation";
    return std::nullopt;
  }
};

// Extends matchInto semantics with pre-seeded bindings.
bool matchExtend(const Term& pattern, const Term& subject, Substitution& theta) {
  if (pattern.isVariable()) {
    if (const Term* bound = theta.lookup(pattern.var())) return *bound == subject;
    if (pattern.sort() != subject.sort()) return false;
    theta.bind(pattern.var(), subject);
    return true;
  }
  if (subject.isVariable()) return false;
  if (pattern.symbol() != subject.symbol()) return false;
  for (std::size_t i = 0; i < pattern.args().size(); ++i)
    if (!matchExtend(pattern.args()[i], subject.args()[i], theta)) return false;
  return true;
}

struct Replay {
  const CheckContext& ctx;
  std::optional<ProofInvalid> failure;

  bool fail(const std::string& location, const std::string& reason) {
    if (!failure) failure = ProofInvalid{location, reason};
    return false;
  }

  // Builds theta from explicit bindings, keyed against the equation's
  // variables, then completes it by matching `from` against the subterm.
  bool applyEquation(const Equation& eq, StepDir dir, const std::vector<int>& pos,
                     const std::vector<NamedBinding>& bindings, Term& current,
                     const std::string& location) {
    const Term& from = dir == StepDir::Fwd ? eq.lhs : eq.rhs;
    const Term& to = dir == StepDir::Fwd ? eq.rhs : eq.lhs;

    std::vector<Var> eqVars = eq.lhs.vars();
    for (const Var& v : eq.rhs.vars())
      if (std::find(eqVars.begin(), eqVars.end(), v) == eqVars.end()) eqVars.push_back(v);

    Substitution theta;
    for (const NamedBinding& b : bindings) {
      const Var* target = nullptr;
      for (const Var& v : eqVars)
        if (v.name == b.name) target = &v;
      if (!target)
        return fail(location, "binding for '" + b.name + "' does not name a variable of " +
                                  eq.display);
      if (b.value.sort() != target->sort)
        return fail(location, "binding for '" + b.name + "' has the wrong sort");
      theta.bind(*target, b.value);
    }

    Term sub;
    try {
      sub = current.at(pos);
    } catch (const Error&) {
      return fail(location, "position " + positionToString(pos) + " does not exist in " +
                                current.str());
    }
    if (!matchExtend(from, sub, theta))
      return fail(location, "expected an instance of " + from.str() + " at " +
                                positionToString(pos) + ", found " + sub.str());
    for (const Var& v : eqVars)
      if (!theta.contains(v))
        return fail(location, "substitution incomplete: '" + v.name +
                                  "' is unbound; add it to the with-clause");
    current = current.replaceAt(pos, theta.apply(to));
    return true;
  }

  bool runSteps(const std::vector<Step>& steps, Term& current, Term& target,
                const std::string& where) {
    for (std::size_t i = 0; i < steps.size(); ++i) {
      std::string location = where.empty() ? "step " + std::to_string(i + 1)
                                           : where + ", step " + std::to_string(i + 1);
      const Step& step = steps[i];
      if (const EqStep* s = std::get_if<EqStep>(&step.v)) {
        auto eq = ctx.equationFor(*s);
        if (!eq) return fail(location, "no rule named '" + s->ruleName + "'");
        if (!applyEquation(*eq, s->dir, s->position, s->bindings, current, location))
          return false;
      } else if (const EStep* s = std::get_if<EStep>(&step.v)) {
        std::string err;
        auto eq = ctx.equationForE(s->which, err);
        if (!eq) return fail(location, err);
        if (!applyEquation(*eq, s->dir, s->position, s->bindings, current, location))
          return false;
      } else if (const LemmaStep* s = std::get_if<LemmaStep>(&step.v)) {
        const ProofScript* lemma = nullptr;
        for (const ProofScript& l : ctx.lemmas)
          if (l.name == s->lemmaName) lemma = &l;
        if (!lemma) return fail(location, "no lemma named '" + s->lemmaName + "'");
        Equation eq{lemma->goalLhs, lemma->goalRhs, "lemma " + lemma->name};
        if (!applyEquation(eq, s->dir, s->position, s->bindings, current, location))
          return false;
      } else if (const CaseSplit* s = std::get_if<CaseSplit>(&step.v)) {
        if (!runCaseSplit(*s, current, location)) return false;
      } else if (const Thus* s = std::get_if<Thus>(&step.v)) {
        if (current != s->term)
          return fail(location, "checkpoint mismatch: expected " + s->term.str() + ", have " +
                                    current.str());
      } else if (std::get_if<SymMarker>(&step.v)) {
        std::swap(current, target);
      }
    }
    return true;
  }

  bool runCaseSplit(const CaseSplit& s, Term& current, const std::string& location) {
    const std::vector<Term>& D = ctx.universe.elements;
    if (D.empty()) return fail(location, "case split over an empty data universe");

    // coverage: labels must be exactly D
    if (s.branches.size() != D.size())
      return fail(location, "case split covers " + std::to_string(s.branches.size()) +
                                " element(s); D has " + std::to_string(D.size()));
    for (const Term& d : D) {
      bool found = false;
      for (const CaseBranch& b : s.branches)
        if (b.label == d) found = true;
      if (!found) return fail(location, "case split misses element " + d.str());
    }
    std::set<std::string> seen;
    for (const CaseBranch& b : s.branches)
      if (!seen.insert(b.label.str()).second)
        return fail(location, "duplicate case branch " + b.label.str());

    Term from = s.from, to = s.to;
    if (!s.explicitFromTo) {
      from = current;
      // `to` is determined below from the branches' final terms
      if (!from.contains(s.variable))
        return fail(location, "case variable '" + s.variable.name + "' does not occur in " +
                                  from.str());
    }

    Substitution theta;
    for (const NamedBinding& b : s.bindings) {
      if (b.name == s.variable.name)
        return fail(location, "the case variable may not be bound in the with-clause");
      theta.bind(Var{b.name, b.value.sort()}, b.value);
    }

    // verify branches: each proves from[x:=u] ~ to[x:=u]
    std::optional<Term> inferredTo;
    for (const Term& d : D) {
      const CaseBranch* branch = nullptr;
      for (const CaseBranch& b : s.branches)
        if (b.label == d) branch = &b;
      Substitution inst;
      inst.bind(s.variable, d);
      Term cur = inst.apply(from);
      Term tgt;
      std::string branchWhere = location + ", case " + d.str();
      if (s.explicitFromTo) {
        tgt = inst.apply(to);
        if (!runSteps(branch->steps, cur, tgt, branchWhere)) return false;
        if (cur != tgt)
          return fail(branchWhere, "branch ends at " + cur.str() + ", expected " + tgt.str());
      } else {
        // replay, then require a common final term across branches
        Term dummyTarget = cur;
        if (!runSteps(branch->steps, cur, dummyTarget, branchWhere)) return false;
        if (inferredTo && *inferredTo != cur)
          return fail(branchWhere, "branches end at different terms: " + inferredTo->str() +
                                       " vs " + cur.str());
        inferredTo = cur;
      }
    }
    if (!s.explicitFromTo) to = *inferredTo;

    // context application: the derived fact `from ~ to` holds with all its
    // variables universal, so any instance may be rewritten
    Term sub;
    try {
      sub = current.at(s.position);
    } catch (const Error&) {
      return fail(location, "position " + positionToString(s.position) + " does not exist");
    }
    Substitution full = theta;
    if (!matchExtend(from, sub, full))
      return fail(location, "expected an instance of " + from.str() + " at " +
                                positionToString(s.position) + ", found " + sub.str());
    current = current.replaceAt(s.position, full.apply(to));
    return true;
  }
};

}  // namespace

ProofResult checkProof(const StreamSpec& spec, const ProofScript& script,
                       const std::vector<ProofScript>& lemmas) {
  DataUniverse uni;
  try {
    uni = dataUniverse(spec.sigmaD, spec.rd);
  } catch (const Error& e) {
    return ProofInvalid{"preamble", std::string("cannot compute the data universe: ") + e.what()};
  }
  CheckContext ctx{spec, lemmas, uni, detectTailSymbol(spec)};
  Replay replay{ctx, std::nullopt};
  Term current = script.goalLhs;
  Term target = script.goalRhs;
  std::string where = script.name.empty() ? "" : "lemma " + script.name;
  if (!replay.runSteps(script.steps, current, target, where)) return *replay.failure;
  if (current != target) {
    std::string loc = where.empty() ? "end of proof" : where + ", end of proof";
    return ProofInvalid{loc, "chain ends at " + current.str() + " but the goal needs " +
                                 target.str()};
  }
  return ProofValid{};
}

ProofResult checkProofFile(const StreamSpec& spec, const ProofFile& file) {
  std::vector<ProofScript> checked;
  for (const ProofScript& lemma : file.lemmas) {
    ProofResult r = checkProof(spec, lemma, checked);
    if (!valid(r)) return r;
    checked.push_back(lemma);
  }
  for (const ProofScript& proof : file.proofs) {
    ProofResult r = checkProof(spec, proof, checked);
    if (!valid(r)) return r;
  }
  return ProofValid{};
}

// ---------------------------------------------------------------------------
// Preservation

namespace {

std::string pairKey(const Term& l, const Term& r) {
  Rule tmp(Term::apply(FunSymbol{"@pair", {l.sort(), r.sort()}, Sort::Stream}, {l, r}),
           Term::apply(FunSymbol{"@pair", {l.sort(), r.sort()}, Sort::Stream}, {l, r}));
  Rule canon = canonicalizeRule(tmp);
  return canon.lhs.args()[0].str() + " ~ " + canon.lhs.args()[1].str();
}

}  // namespace

std::string PreservationVerdict::str() const {
  std::ostringstream os;
  os << (preserved ? "preserved" : "incomplete") << "\n";
  for (const ObligationResult& o : results) {
    os << "  [" << (o.aUnderB ? "old-under-new" : "new-under-old") << "] " << o.ruleName << ": "
       << o.lhs.str() << " ~ " << o.rhs.str() << " ... ";
    switch (o.status) {
      case ObligationStatus::Proved: os << "proved"; break;
      case ObligationStatus::Missing: os << "no script"; break;
      case ObligationStatus::Failed: os << "failed (" << o.detail << ")"; break;
    }
    os << "\n";
  }
  return os.str();
}

PreservationVerdict checkPreservation(const StreamSpec& specA, const StreamSpec& specB,
                                      const ProofFile& scriptsAB, const ProofFile& scriptsBA) {
  PreservationVerdict verdict;

  auto shared = [](const Rule& r, const std::vector<Rule>& set) {
    for (const Rule& o : set)
      if (sameRuleModuloRenaming(r, o)) return true;
    return false;
  };

  struct Todo {
    Term lhs;
    Term rhs;
    bool aUnderB;
    std::string ruleName;
  };
  std::vector<Todo> todos;
  for (std::size_t i = 0; i < specA.rs.size(); ++i)
    if (!shared(specA.rs[i], specB.rs))
      todos.push_back({specA.rs[i].lhs, specA.rs[i].rhs, true, specA.ruleName(false, i)});
  for (std::size_t i = 0; i < specB.rs.size(); ++i)
    if (!shared(specB.rs[i], specA.rs))
      todos.push_back({specB.rs[i].lhs, specB.rs[i].rhs, false, specB.ruleName(false, i)});

  // check each supplied file once against its target spec
  ProofResult abResult = checkProofFile(specB, scriptsAB);
  ProofResult baResult = checkProofFile(specA, scriptsBA);

  for (const Todo& todo : todos) {
    ObligationResult res;
    res.lhs = todo.lhs;
    res.rhs = todo.rhs;
    res.aUnderB = todo.aUnderB;
    res.ruleName = todo.ruleName;

    const ProofFile& file = todo.aUnderB ? scriptsAB : scriptsBA;
    const ProofResult& fileResult = todo.aUnderB ? abResult : baResult;
    std::string key1 = pairKey(todo.lhs, todo.rhs);
    std::string key2 = pairKey(todo.rhs, todo.lhs);
    const ProofScript* found = nullptr;
    for (const ProofScript& p : file.proofs) {
      std::string k = pairKey(p.goalLhs, p.goalRhs);
      if (k == key1 || k == key2) found = &p;
    }
    if (!found) {
      res.status = ObligationStatus::Missing;
      res.detail = "no script proves this obligation";
    } else if (!valid(fileResult)) {
      res.status = ObligationStatus::Failed;
      res.detail = describe(fileResult);
    } else {
      res.status = ObligationStatus::Proved;
    }
    verdict.results.push_back(res);
  }
  verdict.preserved = true;
  for (const ObligationResult& o : verdict.results)
    if (o.status != ObligationStatus::Proved) verdict.preserved = false;
  return verdict;
}

// ---------------------------------------------------------------------------
// Anchor suggestion

std::string AnchorSuggestion::str() const {
  std::ostringstream os;
  os << "fresh constant: " << freshName << "\n";
  os << "anchor equation: " << anchorEquation.lhs.str() << " = " << anchorEquation.rhs.str()
     << "\n";
  os << "definition: " << definition.lhs.str() << " = " << definition.rhs.str() << "\n";
  os << "obligations to discharge (both directions):\n";
  for (const PendingObligation& o : obligations)
    os << "  " << (o.underNew ? "in the new rules: " : "in the old rules: ") << o.lhs.str()
       << " ~ " << o.rhs.str() << "\n";
  return os.str();
}

AnchorSuggestion suggestAnchor(const StreamSpec& spec, const std::string& constantName,
                               std::size_t n, std::size_t fuel) {
  const FunSymbol* c = spec.findStream(constantName);
  if (!c || c->arity() != 0)
    throw Error(ErrorCode::NotComputable, "'" + constantName + "' is not a stream constant");
  auto tailSym = detectTailSymbol(spec);
  if (!tailSym)
    throw Error(ErrorCode::NotComputable,
                "anchoring needs the tail equation: add a rule like tail0(x : s) = s");

  ObsSystem obsSys = obs(spec);
  Term cTerm = Term::apply(*c);
  std::vector<Term> elems;
  for (std::size_t i = 0; i < n; ++i) {
    EvalResult r = element(spec, obsSys, cTerm, i, fuel);
    if (!r.isValue())
      throw Error(ErrorCode::NotComputable,
                  "element " + std::to_string(i) + " of " + constantName +
                      " has no computable value (" + r.describe() + ")");
    elems.push_back(r.term);
  }

  FreshNamer namer(spec);
  std::string freshName = namer.fresh(constantName + "_a1");
  FunSymbol fresh{freshName, {}, Sort::Stream};

  Term defRhs = cTerm;
  for (std::size_t i = 0; i < n; ++i) defRhs = Term::apply(*tailSym, {defRhs});
  StreamSpec withDef = addDefinition(spec, fresh, defRhs);

  Term anchorRhs = Term::apply(fresh);
  for (std::size_t i = n; i-- > 0;) anchorRhs = Term::cons(elems[i], anchorRhs);
  Rule anchor(cTerm, anchorRhs);

  std::vector<Rule> newRs;
  for (const Rule& r : withDef.rs) {
    if (!r.lhs.isVariable() && r.lhs.symbol() == *c)
      continue;  // drop the old c-rules
    newRs.push_back(r);
  }
  newRs.push_back(anchor);
  return AnchorSuggestion{freshName, anchor, withDef.rs.back(),
                          replaceRules(withDef, newRs).obligations};
}

// ---------------------------------------------------------------------------
// Bounded script search (convenience only)

std::optional<ProofScript> searchScript(const StreamSpec& spec, const Term& lhs, const Term& rhs,
                                        std::size_t maxDepth, std::size_t maxWidth) {
  DataUniverse uni;
  try {
    uni = dataUniverse(spec.sigmaD, spec.rd);
  } catch (const Error&) {
    return std::nullopt;
  }
  auto tailSym = detectTailSymbol(spec);

  struct Node {
    Term term;
    std::vector<Step> steps;
  };

  struct SearchEq {
    Term l, r;
    bool isRule;
    std::string name;
    int eIndex;
  };
  std::vector<SearchEq> equations;
  for (std::size_t i = 0; i < spec.rs.size(); ++i)
    equations.push_back({spec.rs[i].lhs, spec.rs[i].rhs, true, spec.ruleName(false, i), 0});
  for (std::size_t i = 0; i < spec.rd.size(); ++i)
    equations.push_back({spec.rd[i].lhs, spec.rd[i].rhs, true, spec.ruleName(true, i), 0});
  if (tailSym) {
    Term x = Term::variable("x@E", Sort::Data);
    Term s = Term::variable("s@E", Sort::Stream);
    Term xs = Term::cons(x, s);
    equations.push_back({Term::apply(headSymbol(), {xs}), x, false, "E1", 1});
    equations.push_back({Term::apply(*tailSym, {xs}), s, false, "E2", 2});
    equations.push_back(
        {s, Term::cons(Term::apply(headSymbol(), {s}), Term::apply(*tailSym, {s})), false, "E3",
         3});
  }

  std::deque<Node> frontier{{lhs, {}}};
  std::set<Term> visited{lhs};
  for (std::size_t depth = 0; depth < maxDepth && !frontier.empty(); ++depth) {
    std::deque<Node> next;
    for (const Node& node : frontier) {
      std::vector<std::vector<int>> positions;
      std::function<void(const Term&, std::vector<int>&)> walk = [&](const Term& t,
                                                                     std::vector<int>& p) {
        positions.push_back(p);
        if (t.isVariable()) return;
        for (std::size_t i = 0; i < t.args().size(); ++i) {
          p.push_back(static_cast<int>(i + 1));
          walk(t.args()[i], p);
          p.pop_back();
        }
      };
      std::vector<int> p;
      walk(node.term, p);

      for (const std::vector<int>& pos : positions) {
        Term sub = node.term.at(pos);
        for (const SearchEq& eq : equations) {
          for (int d = 0; d < 2; ++d) {
            const Term& from = d == 0 ? eq.l : eq.r;
            const Term& to = d == 0 ? eq.r : eq.l;
            // require every variable of `to` to be bound by the match so the
            // result stays determined (rules out E3 backwards at random data)
            if (from.isVariable() && to.isVariable()) continue;
            auto theta = match(from, sub);
            if (!theta) continue;
            bool covered = true;
            for (const Var& v : to.vars())
              if (!theta->contains(v)) covered = false;
            if (!covered) continue;
            Term result = node.term.replaceAt(pos, theta->apply(to));
            if (!visited.insert(result).second) continue;
            Node succ{result, node.steps};
            std::vector<NamedBinding> bindings;
            for (const auto& [v, t] : theta->entries()) bindings.push_back({v.name, t});
            if (eq.isRule) {
              succ.steps.push_back(
                  Step{EqStep{eq.name, d == 0 ? StepDir::Fwd : StepDir::Bwd, pos, bindings}});
            } else {
              succ.steps.push_back(
                  Step{EStep{eq.eIndex, d == 0 ? StepDir::Fwd : StepDir::Bwd, pos, bindings}});
            }
            if (result == rhs) {
              ProofScript script;
              script.goalLhs = lhs;
              script.goalRhs = rhs;
              script.steps = std::move(succ.steps);
              return script;
            }
            if (next.size() < maxWidth) next.push_back(std::move(succ));
          }
        }
      }
    }
    frontier = std::move(next);
  }
  return std::nullopt;
}

}  // namespace streamwd
