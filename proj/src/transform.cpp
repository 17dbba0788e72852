#include "streamwd/transform.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include "streamwd/detail/lexer.hpp"
#include "streamwd/syntax.hpp"

namespace streamwd {

FreshNamer::FreshNamer(const StreamSpec& spec) {
  for (const FunSymbol& s : spec.sigmaD) reserved_.insert(s.name);
  for (const FunSymbol& s : spec.sigmaS) reserved_.insert(s.name);
  reserved_.insert("head");
  reserved_.insert("tail");
}

std::string FreshNamer::fresh(const std::string& base) {
  std::string name = base;
  while (reserved_.count(name) || isReservedWord(name)) name += "'";
  reserved_.insert(name);
  return name;
}

Trs ObsSystem::withDataRules(const StreamSpec& spec) const {
  std::vector<Rule> rules = trs.rules;
  rules.insert(rules.end(), spec.rd.begin(), spec.rd.end());
  return Trs::fromRules(std::move(rules), trs.signature);
}

// ---------------------------------------------------------------------------

std::vector<Rule> pTransform(const std::vector<Rule>& rs) {
  std::vector<Rule> out;
  out.reserve(rs.size());
  for (const Rule& r : rs) {
    if (r.lhs.isVariable() || !r.lhs.args().size()) {
      out.push_back(r);
      continue;
    }
    const FunSymbol& f = r.lhs.symbol();
    Substitution theta;
    std::vector<Term> newArgs;
    newArgs.reserve(r.lhs.args().size());
    for (std::size_t k = 0; k < r.lhs.args().size(); ++k) {
      const Term& arg = r.lhs.args()[k];
      if (f.argSorts[k] == Sort::Stream && !arg.isVariable()) {
        if (arg.symbol() != consSymbol() || !arg.args()[0].isVariable() ||
            !arg.args()[1].isVariable())
          throw Error(ErrorCode::ShapeError,
                      "stream argument '" + arg.str() + "' of rule " + r.str() +
                          " is neither a variable nor x : sigma");
        Var x = arg.args()[0].var();
        Var sigma = arg.args()[1].var();
        Term sigmaTerm = Term::variable(sigma);
        theta.bind(x, Term::apply(headSymbol(), {sigmaTerm}));
        theta.bind(sigma, Term::apply(tailSymbol(), {sigmaTerm}));
        newArgs.push_back(sigmaTerm);
      } else {
        newArgs.push_back(arg);
      }
    }
    Term lhs = Term::apply(f, std::move(newArgs));
    Term rhs = theta.apply(r.rhs);
    out.push_back(Rule(lhs, rhs));
  }
  return out;
}

namespace {

// Renames user-declared `tail`/`head` symbols out of the way, as the Obs
// construction reserves those names.
StreamSpec renameReservedObs(const StreamSpec& spec, std::map<std::string, std::string>& renames) {
  bool clash = false;
  for (const FunSymbol& s : spec.sigmaS)
    if (s.name == "tail" || s.name == "head") clash = true;
  for (const FunSymbol& s : spec.sigmaD)
    if (s.name == "tail" || s.name == "head") clash = true;
  if (!clash) return spec;

  FreshNamer namer(spec);
  std::map<std::string, std::string> map;
  for (const std::string& name : {std::string("head"), std::string("tail")})
    if (spec.findSymbol(name)) map[name] = namer.fresh(name + "0");
  renames = map;

  auto renameSym = [&](FunSymbol s) {
    auto it = map.find(s.name);
    if (it != map.end()) s.name = it->second;
    return s;
  };
  std::function<Term(const Term&)> renameTerm = [&](const Term& t) -> Term {
    if (t.isVariable()) return t;
    std::vector<Term> args;
    for (const Term& a : t.args()) args.push_back(renameTerm(a));
    return Term::apply(renameSym(t.symbol()), std::move(args));
  };

  StreamSpec out;
  for (const FunSymbol& s : spec.sigmaD) out.sigmaD.push_back(renameSym(s));
  for (const FunSymbol& s : spec.sigmaS) out.sigmaS.push_back(renameSym(s));
  for (const Rule& r : spec.rd) out.rd.push_back(Rule(renameTerm(r.lhs), renameTerm(r.rhs)));
  for (const Rule& r : spec.rs) out.rs.push_back(Rule(renameTerm(r.lhs), renameTerm(r.rhs)));
  return out;
}

}  // namespace

ObsSystem obs(const StreamSpec& inputSpec) {
  ObsSystem sys;
  StreamSpec spec = renameReservedObs(inputSpec, sys.renames);

  std::vector<Rule> p = pTransform(spec.rs);

  std::vector<Rule> rules;
  std::vector<ObsRuleOrigin> origin;
  Term x = Term::variable("x", Sort::Data);
  Term sigma = Term::variable("sigma", Sort::Stream);
  Term xs = Term::cons(x, sigma);
  rules.push_back(Rule(Term::apply(headSymbol(), {xs}), x));
  origin.push_back({true, 0});
  rules.push_back(Rule(Term::apply(tailSymbol(), {xs}), sigma));
  origin.push_back({true, 0});

  for (std::size_t i = 0; i < p.size(); ++i) {
    const Rule& r = p[i];
    Term headL = Term::apply(headSymbol(), {r.lhs});
    Term tailL = Term::apply(tailSymbol(), {r.lhs});
    if (!r.rhs.isVariable() && r.rhs.symbol() == consSymbol()) {
      rules.push_back(Rule(headL, r.rhs.args()[0]));
      origin.push_back({false, i});
      rules.push_back(Rule(tailL, r.rhs.args()[1]));
      origin.push_back({false, i});
    } else {
      rules.push_back(Rule(headL, Term::apply(headSymbol(), {r.rhs})));
      origin.push_back({false, i});
      rules.push_back(Rule(tailL, Term::apply(tailSymbol(), {r.rhs})));
      origin.push_back({false, i});
    }
  }

  std::vector<FunSymbol> sig = spec.sigmaD;
  sig.insert(sig.end(), spec.sigmaS.begin(), spec.sigmaS.end());
  sig.push_back(consSymbol());
  sig.push_back(headSymbol());
  sig.push_back(tailSymbol());

  sys.trs = Trs::fromRules(std::move(rules), std::move(sig));
  sys.origin = std::move(origin);

  // Post-checks: the shape needed by the construction (below head/tail one
  // stream symbol whose stream arguments are variables, all variables
  // pairwise distinct) and orthogonality of the combined system.
  for (std::size_t i = 2; i < sys.trs.rules.size(); ++i) {
    const Term& l = sys.trs.rules[i].lhs;
    const Term& inner = l.args()[0];
    if (inner.isVariable() || !spec.findStream(inner.symbol().name))
      throw Error(ErrorCode::ShapeError, "observational rule " + sys.trs.rules[i].str() +
                                             " is not head/tail over a stream symbol");
    for (std::size_t k = 0; k < inner.args().size(); ++k) {
      if (inner.symbol().argSorts[k] == Sort::Stream && !inner.args()[k].isVariable())
        throw Error(ErrorCode::ShapeError,
                    "observational left-hand side has a non-variable stream argument: " +
                        l.str());
    }
    std::vector<Var> seen;
    std::function<void(const Term&)> scan = [&](const Term& t) {
      if (t.isVariable()) {
        if (std::find(seen.begin(), seen.end(), t.var()) != seen.end())
          throw Error(ErrorCode::ShapeError,
                      "observational left-hand side repeats a variable: " + l.str());
        seen.push_back(t.var());
        return;
      }
      for (const Term& a : t.args()) scan(a);
    };
    scan(l);
  }
  {
    std::vector<Rule> all = sys.trs.rules;
    all.insert(all.end(), spec.rd.begin(), spec.rd.end());
    std::vector<std::string> names;
    for (std::size_t i = 0; i < all.size(); ++i) names.push_back("obs#" + std::to_string(i + 1));
    auto violations = orthogonalityViolations(all, names);
    if (!violations.empty())
      throw Error(ErrorCode::NotOrthogonal,
                  "observational variant is not orthogonal: " + violations.front());
  }
  return sys;
}

// ---------------------------------------------------------------------------

StreamSpec unfold(const StreamSpec& spec, const std::string& fname, int i) {
  const FunSymbol* f = spec.findStream(fname);
  if (!f) throw Error(ErrorCode::NotUnfoldable, "no stream symbol '" + fname + "'");
  std::size_t nData = 0, nStream = 0;
  for (Sort s : f->argSorts) (s == Sort::Data ? nData : nStream)++;
  if (i < 1 || static_cast<std::size_t>(i) > nStream)
    throw Error(ErrorCode::BadPosition, "'" + fname + "' has " + std::to_string(nStream) +
                                            " stream position(s); " + std::to_string(i) +
                                            " is out of range");
  // absolute argument index of the i-th stream position
  std::size_t argIdx = 0;
  {
    int seen = 0;
    for (std::size_t k = 0; k < f->argSorts.size(); ++k) {
      if (f->argSorts[k] == Sort::Stream && ++seen == i) {
        argIdx = k;
        break;
      }
    }
  }

  // the rules to replace: every f-rule with a cons pattern at that position
  std::vector<std::size_t> affected;
  bool qualifies = false;
  for (std::size_t r = 0; r < spec.rs.size(); ++r) {
    const Rule& rule = spec.rs[r];
    if (rule.lhs.isVariable() || rule.lhs.symbol() != *f) continue;
    const Term& arg = rule.lhs.args()[argIdx];
    if (arg.isVariable()) continue;
    if (arg.symbol() != consSymbol()) continue;
    affected.push_back(r);
    if (!(arg.args()[0].isVariable() && arg.args()[1].isVariable())) qualifies = true;
  }
  if (!qualifies)
    throw Error(ErrorCode::NotUnfoldable,
                "no rule of '" + fname + "' has a non-trivial pattern at stream position " +
                    std::to_string(i));

  FreshNamer namer(spec);
  std::string gname = namer.fresh(fname + "_u" + std::to_string(i));
  std::vector<Sort> gArgs;
  for (std::size_t k = 0; k < f->argSorts.size(); ++k)
    if (f->argSorts[k] == Sort::Data) gArgs.push_back(Sort::Data);
  gArgs.push_back(Sort::Data);  // the new data slot, after the original data args
  for (std::size_t k = 0; k < f->argSorts.size(); ++k)
    if (f->argSorts[k] == Sort::Stream) gArgs.push_back(Sort::Stream);
  FunSymbol g{gname, gArgs, Sort::Stream};

  // bridging equation f(x1..xn, s1.., x{n+1}:s_i, .., sm) = g(x1..x{n+1}, s1..sm)
  std::vector<Term> fArgs;
  std::vector<Term> gDataArgs, gStreamArgs;
  int dCount = 0, sCount = 0;
  for (std::size_t k = 0; k < f->argSorts.size(); ++k) {
    if (f->argSorts[k] == Sort::Data) {
      Term v = Term::variable("x" + std::to_string(++dCount), Sort::Data);
      fArgs.push_back(v);
      gDataArgs.push_back(v);
    } else {
      Term v = Term::variable("s" + std::to_string(++sCount), Sort::Stream);
      if (k == argIdx) {
        Term hd = Term::variable("x" + std::to_string(static_cast<int>(nData) + 1), Sort::Data);
        fArgs.push_back(Term::cons(hd, v));
        gStreamArgs.push_back(v);
        gDataArgs.push_back(hd);  // placeholder slot; reordered below
      } else {
        fArgs.push_back(v);
        gStreamArgs.push_back(v);
      }
    }
  }
  // gDataArgs currently has the new head variable at its insertion-order spot;
  // the fresh data variable must sit in the last data slot.
  {
    Term hd = Term::variable("x" + std::to_string(static_cast<int>(nData) + 1), Sort::Data);
    std::vector<Term> fixed;
    for (const Term& t : gDataArgs)
      if (t != hd) fixed.push_back(t);
    fixed.push_back(hd);
    gDataArgs = std::move(fixed);
  }
  std::vector<Term> gAll = gDataArgs;
  gAll.insert(gAll.end(), gStreamArgs.begin(), gStreamArgs.end());
  Rule bridge(Term::apply(*f, fArgs), Term::apply(g, gAll));

  StreamSpec out;
  out.sigmaD = spec.sigmaD;
  out.sigmaS = spec.sigmaS;
  out.sigmaS.push_back(g);
  out.rd = spec.rd;

  for (std::size_t r = 0; r < spec.rs.size(); ++r) {
    if (r == affected.front()) out.rs.push_back(bridge);
    if (std::find(affected.begin(), affected.end(), r) != affected.end()) {
      const Rule& rule = spec.rs[r];
      const Term& pat = rule.lhs.args()[argIdx];  // u : t'
      std::vector<Term> dataArgs, streamArgs;
      for (std::size_t k = 0; k < rule.lhs.args().size(); ++k) {
        if (f->argSorts[k] == Sort::Data) dataArgs.push_back(rule.lhs.args()[k]);
        else if (k == argIdx) streamArgs.push_back(pat.args()[1]);
        else streamArgs.push_back(rule.lhs.args()[k]);
      }
      dataArgs.push_back(pat.args()[0]);  // u moves to the new data slot
      std::vector<Term> all = dataArgs;
      all.insert(all.end(), streamArgs.begin(), streamArgs.end());
      out.rs.push_back(Rule(Term::apply(g, all), rule.rhs));
    } else {
      out.rs.push_back(spec.rs[r]);
    }
  }
  return out;
}

StreamSpec unfoldAll(const StreamSpec& start) {
  StreamSpec spec = start;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const FunSymbol& f : std::vector<FunSymbol>(spec.sigmaS)) {
      std::size_t nStream = 0;
      for (Sort s : f.argSorts)
        if (s == Sort::Stream) ++nStream;
      for (std::size_t i = 1; i <= nStream && !changed; ++i) {
        try {
          spec = unfold(spec, f.name, static_cast<int>(i));
          changed = true;
        } catch (const Error&) {
          // this (f, i) does not qualify; keep scanning
        }
      }
      if (changed) break;
    }
  }
  return spec;
}

// ---------------------------------------------------------------------------

StreamSpec addDefinition(const StreamSpec& spec, const FunSymbol& g, const Term& defLhs) {
  if (spec.hasSymbol(g.name) || g.name == "head" || g.name == "tail")
    throw Error(ErrorCode::SymbolClash, "symbol '" + g.name + "' already exists");
  if (defLhs.containsSymbol(g.name))
    throw Error(ErrorCode::SymbolClash, "defining term mentions '" + g.name + "'");
  if (g.resultSort != Sort::Stream || defLhs.sort() != Sort::Stream)
    throw Error(ErrorCode::BadTerm, "definitions must be of stream sort");

  std::vector<Term> dataVars, streamVars;
  for (const Var& v : defLhs.vars())
    (v.sort == Sort::Data ? dataVars : streamVars).push_back(Term::variable(v));
  std::size_t nData = 0, nStream = 0;
  for (Sort s : g.argSorts) (s == Sort::Data ? nData : nStream)++;
  if (dataVars.size() != nData || streamVars.size() != nStream)
    throw Error(ErrorCode::VariableEscape,
                "defining term has " + std::to_string(dataVars.size()) + " data and " +
                    std::to_string(streamVars.size()) + " stream variable(s); '" + g.name +
                    "' expects " + std::to_string(nData) + " and " + std::to_string(nStream));

  std::vector<Term> args = dataVars;
  args.insert(args.end(), streamVars.begin(), streamVars.end());
  StreamSpec out = spec;
  out.sigmaS.push_back(g);
  out.rs.push_back(Rule(Term::apply(g, args), defLhs));
  return out;
}

ReplacementResult replaceRules(const StreamSpec& spec, const std::vector<Rule>& newRs) {
  for (const Rule& r : newRs)
    if (r.lhs.sort() != Sort::Stream)
      throw Error(ErrorCode::BadTerm, "replacement rule is not of stream sort: " + r.str());

  ReplacementResult res;
  res.spec = spec;
  res.spec.rs = newRs;

  auto shared = [](const Rule& r, const std::vector<Rule>& set) {
    for (const Rule& o : set)
      if (sameRuleModuloRenaming(r, o)) return true;
    return false;
  };
  for (std::size_t i = 0; i < spec.rs.size(); ++i)
    if (!shared(spec.rs[i], newRs))
      res.obligations.push_back(
          {spec.rs[i].lhs, spec.rs[i].rhs, true, spec.ruleName(false, i)});
  for (std::size_t i = 0; i < newRs.size(); ++i)
    if (!shared(newRs[i], spec.rs))
      res.obligations.push_back(
          {newRs[i].lhs, newRs[i].rhs, false, res.spec.ruleName(false, i)});
  return res;
}

// ---------------------------------------------------------------------------

SelfEqualityGoals makeSelfEqualityGoals(const StreamSpec& spec) {
  SelfEqualityGoals out;
  FreshNamer namer(spec);
  std::map<std::string, std::string> primed;
  for (const FunSymbol& f : spec.sigmaS) primed[f.name] = namer.fresh(f.name + "'");

  out.doubled = spec;
  std::function<Term(const Term&)> primeTerm = [&](const Term& t) -> Term {
    if (t.isVariable()) return t;
    FunSymbol sym = t.symbol();
    auto it = primed.find(sym.name);
    if (it != primed.end()) sym.name = it->second;
    std::vector<Term> args;
    for (const Term& a : t.args()) args.push_back(primeTerm(a));
    return Term::apply(sym, std::move(args));
  };
  for (const FunSymbol& f : spec.sigmaS) {
    FunSymbol copy = f;
    copy.name = primed[f.name];
    out.doubled.sigmaS.push_back(copy);
  }
  for (const Rule& r : spec.rs)
    out.doubled.rs.push_back(Rule(primeTerm(r.lhs), primeTerm(r.rhs)));

  for (const FunSymbol& f : spec.sigmaS) {
    std::vector<Term> args;
    int dCount = 0, sCount = 0;
    for (Sort s : f.argSorts) {
      if (s == Sort::Data)
        args.push_back(Term::variable("x" + std::to_string(++dCount), Sort::Data));
      else
        args.push_back(Term::variable("s" + std::to_string(++sCount), Sort::Stream));
    }
    FunSymbol fp = f;
    fp.name = primed[f.name];
    out.goals.push_back({Term::apply(f, args), Term::apply(fp, args)});
  }
  return out;
}

std::string renderGoalsFile(const SelfEqualityGoals& g) {
  std::ostringstream os;
  RenderResult spec = renderSpec(g.doubled);
  os << spec.text;
  auto renderVarTerm = [](const Term& t) { return t.str(); };
  for (const Goal& goal : g.goals)
    os << "goal " << renderVarTerm(goal.lhs) << " == " << renderVarTerm(goal.rhs) << " ;\n";
  return os.str();
}

namespace {

using detail::Lexer;
using detail::Tok;
using detail::Token;

// Sort-directed term parser for goal lines: identifiers that are not symbols
// become variables with the sort expected at their position.
struct GoalTermParser {
  const StreamSpec& spec;
  Lexer& lex;
  std::map<std::string, Sort>& varSorts;

  Term parse(std::optional<Sort> expected) {
    Term left = parseApp(expected);
    if (lex.peek().kind == Tok::Colon) {
      Token t = lex.peek();
      if (expected && *expected != Sort::Stream)
        throw ParseError(t.line, t.col, "':' builds a stream where sort d was expected");
      if (left.sort() != Sort::Data)
        throw ParseError(t.line, t.col, "left argument of ':' must have sort d");
      lex.next();
      Term right = parse(Sort::Stream);
      return Term::cons(left, right);
    }
    if (expected && left.sort() != *expected)
      throw ParseError(lex.peek().line, lex.peek().col,
                       "term '" + left.str() + "' has sort " + to_string(left.sort()) +
                           ", expected " + to_string(*expected));
    return left;
  }

  Term parseApp(std::optional<Sort> expected) {
    Token t = lex.peek();
    if (t.kind != Tok::Ident && t.kind != Tok::Number) lex.fail(t, "term");
    lex.next();
    std::string name = t.text;
    // the observation symbol `head` may occur in goal and proof terms
    if (name == "head" && !spec.findSymbol(name)) {
      if (lex.peek().kind != Tok::LParen) throw ParseError(t.line, t.col, "'head' expects (");
      lex.next();
      Term arg = parse(Sort::Stream);
      if (lex.peek().kind != Tok::RParen) lex.fail(lex.peek(), "')'");
      lex.next();
      return Term::apply(headSymbol(), {arg});
    }
    if (lex.peek().kind == Tok::LParen) {
      const FunSymbol* sym = spec.findSymbol(name);
      if (!sym) throw ParseError(t.line, t.col, "undeclared symbol '" + name + "'");
      lex.next();
      std::vector<Term> args;
      for (std::size_t i = 0; i < sym->arity(); ++i) {
        if (i) {
          if (lex.peek().kind != Tok::Comma) lex.fail(lex.peek(), "','");
          lex.next();
        }
        args.push_back(parse(sym->argSorts[i]));
      }
      if (lex.peek().kind != Tok::RParen) lex.fail(lex.peek(), "')'");
      lex.next();
      return Term::apply(*sym, std::move(args));
    }
    if (const FunSymbol* sym = spec.findSymbol(name)) {
      if (sym->arity() != 0)
        throw ParseError(t.line, t.col, "'" + name + "' expects arguments");
      return Term::apply(*sym);
    }
    // a variable; the sort comes from context, except before ':'
    std::optional<Sort> sort = expected;
    if (lex.peek().kind == Tok::Colon) sort = Sort::Data;
    auto it = varSorts.find(name);
    if (it != varSorts.end()) {
      if (sort && it->second != *sort)
        throw ParseError(t.line, t.col, "variable '" + name + "' used at two sorts");
      sort = it->second;
    } else {
      if (!sort)
        throw ParseError(t.line, t.col,
                         "cannot infer the sort of variable '" + name + "' here");
      varSorts.emplace(name, *sort);
    }
    return Term::variable(name, *sort);
  }
};

}  // namespace

// Parses goal terms against a given signature; exposed for the proof parser.
Term parseGoalTerm(const StreamSpec& spec, detail::Lexer& lex,
                   std::map<std::string, Sort>& varSorts, std::optional<Sort> expected) {
  GoalTermParser p{spec, lex, varSorts};
  return p.parse(expected);
}

SelfEqualityGoals parseGoalsFile(const std::string& text) {
  // split: spec blocks come first, goal lines afterwards
  // We parse the spec portion with parseSpec by locating the first "goal"
  // token at line granularity.
  std::istringstream in(text);
  std::string specPart, goalPart, line;
  bool inGoals = false;
  while (std::getline(in, line)) {
    std::string trimmed = line;
    std::size_t pos = trimmed.find_first_not_of(" \t");
    if (pos != std::string::npos && trimmed.compare(pos, 5, "goal ") == 0) inGoals = true;
    (inGoals ? goalPart : specPart) += line + "\n";
  }
  SelfEqualityGoals out;
  out.doubled = parseSpec(specPart);
  Lexer lex(goalPart);
  while (!lex.atEnd()) {
    Token t = lex.peek();
    if (t.kind != Tok::Ident || t.text != "goal") lex.fail(t, "'goal'");
    lex.next();
    std::map<std::string, Sort> varSorts;
    Term lhs = parseGoalTerm(out.doubled, lex, varSorts, Sort::Stream);
    if (lex.peek().kind != Tok::EqEq) lex.fail(lex.peek(), "'=='");
    lex.next();
    Term rhs = parseGoalTerm(out.doubled, lex, varSorts, Sort::Stream);
    if (lex.peek().kind != Tok::Semi) lex.fail(lex.peek(), "';'");
    lex.next();
    out.goals.push_back({lhs, rhs});
  }
  return out;
}

}  // namespace streamwd
