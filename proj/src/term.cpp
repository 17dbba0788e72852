#include "streamwd/term.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace streamwd {

const char* to_string(Sort s) { return s == Sort::Data ? "d" : "s"; }

const FunSymbol& consSymbol() {
  static const FunSymbol sym{":", {Sort::Data, Sort::Stream}, Sort::Stream};
  return sym;
}

const FunSymbol& headSymbol() {
  static const FunSymbol sym{"head", {Sort::Stream}, Sort::Data};
  return sym;
}

const FunSymbol& tailSymbol() {
  static const FunSymbol sym{"tail", {Sort::Stream}, Sort::Stream};
  return sym;
}

// ---------------------------------------------------------------------------

struct Term::Node {
  bool isVar = false;
  // variable payload
  std::string varName;
  Sort varSort = Sort::Data;
  // application payload
  FunSymbol sym;
  std::vector<Term> args;
  // cached
  std::size_t size = 1;
  std::size_t hash = 0;
};

namespace {

std::size_t hashCombine(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

}  // namespace

Term Term::variable(std::string name, Sort sort) {
  auto n = std::make_shared<Node>();
  n->isVar = true;
  n->varName = std::move(name);
  n->varSort = sort;
  n->size = 1;
  n->hash = hashCombine(std::hash<std::string>{}(n->varName), sort == Sort::Data ? 11 : 13);
  return Term(std::move(n));
}

Term Term::apply(FunSymbol sym, std::vector<Term> args) {
  if (args.size() != sym.arity())
    throw Error(ErrorCode::BadTerm, "symbol '" + sym.name + "' expects " +
                                        std::to_string(sym.arity()) + " arguments, got " +
                                        std::to_string(args.size()));
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (!args[i].valid())
      throw Error(ErrorCode::BadTerm, "invalid argument term for '" + sym.name + "'");
    if (args[i].sort() != sym.argSorts[i])
      throw Error(ErrorCode::BadTerm, "argument " + std::to_string(i + 1) + " of '" + sym.name +
                                          "' must have sort " + to_string(sym.argSorts[i]));
  }
  auto n = std::make_shared<Node>();
  n->isVar = false;
  n->sym = std::move(sym);
  n->args = std::move(args);
  std::size_t h = std::hash<std::string>{}(n->sym.name);
  std::size_t sz = 1;
  for (const Term& a : n->args) {
    h = hashCombine(h, a.hash());
    sz += a.size();
  }
  n->size = sz;
  n->hash = h;
  return Term(std::move(n));
}

Term Term::cons(Term head, Term tail) {
  std::vector<Term> args;
  args.push_back(std::move(head));
  args.push_back(std::move(tail));
  return apply(consSymbol(), std::move(args));
}

bool Term::isVariable() const { return node_->isVar; }

Sort Term::sort() const { return node_->isVar ? node_->varSort : node_->sym.resultSort; }

const std::string& Term::varName() const { return node_->varName; }

Var Term::var() const { return Var{node_->varName, node_->varSort}; }

const FunSymbol& Term::symbol() const { return node_->sym; }

const std::vector<Term>& Term::args() const { return node_->args; }

std::size_t Term::size() const { return node_->size; }

std::size_t Term::hash() const { return node_->hash; }

bool Term::operator==(const Term& o) const {
  if (node_ == o.node_) return true;
  if (!node_ || !o.node_) return false;
  if (node_->hash != o.node_->hash || node_->size != o.node_->size) return false;
  if (node_->isVar != o.node_->isVar) return false;
  if (node_->isVar) return node_->varName == o.node_->varName && node_->varSort == o.node_->varSort;
  if (node_->sym != o.node_->sym) return false;
  for (std::size_t i = 0; i < node_->args.size(); ++i)
    if (node_->args[i] != o.node_->args[i]) return false;
  return true;
}

bool Term::operator<(const Term& o) const {
  if (*this == o) return false;
  if (size() != o.size()) return size() < o.size();
  if (isVariable() != o.isVariable()) return isVariable();
  if (isVariable()) {
    if (varName() != o.varName()) return varName() < o.varName();
    return sort() < o.sort();
  }
  if (symbol().name != o.symbol().name) return symbol().name < o.symbol().name;
  for (std::size_t i = 0; i < args().size() && i < o.args().size(); ++i) {
    if (args()[i] != o.args()[i]) return args()[i] < o.args()[i];
  }
  return args().size() < o.args().size();
}

const Term& Term::at(const std::vector<int>& pos) const {
  const Term* cur = this;
  for (int idx : pos) {
    if (cur->isVariable() || idx < 1 || static_cast<std::size_t>(idx) > cur->args().size())
      throw Error(ErrorCode::BadPosition, "no subterm at position " + positionToString(pos) +
                                              " in " + str());
    cur = &cur->args()[static_cast<std::size_t>(idx - 1)];
  }
  return *cur;
}

Term Term::replaceAt(const std::vector<int>& pos, const Term& t) const {
  if (pos.empty()) return t;
  if (isVariable() || pos[0] < 1 || static_cast<std::size_t>(pos[0]) > args().size())
    throw Error(ErrorCode::BadPosition, "no subterm at position " + positionToString(pos) +
                                            " in " + str());
  std::vector<Term> newArgs = args();
  std::vector<int> rest(pos.begin() + 1, pos.end());
  std::size_t i = static_cast<std::size_t>(pos[0] - 1);
  newArgs[i] = newArgs[i].replaceAt(rest, t);
  return Term::apply(symbol(), std::move(newArgs));
}

void Term::collectVars(std::vector<Var>& out) const {
  if (isVariable()) {
    Var v = var();
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
    return;
  }
  for (const Term& a : args()) a.collectVars(out);
}

std::vector<Var> Term::vars() const {
  std::vector<Var> out;
  collectVars(out);
  return out;
}

bool Term::isGround() const {
  if (isVariable()) return false;
  for (const Term& a : args())
    if (!a.isGround()) return false;
  return true;
}

bool Term::contains(const Var& v) const {
  if (isVariable()) return var() == v;
  for (const Term& a : args())
    if (a.contains(v)) return true;
  return false;
}

bool Term::containsSymbol(const std::string& name) const {
  if (isVariable()) return false;
  if (symbol().name == name) return true;
  for (const Term& a : args())
    if (a.containsSymbol(name)) return true;
  return false;
}

std::string Term::str() const {
  std::ostringstream os;
  std::function<void(const Term&)> go = [&](const Term& t) {
    if (t.isVariable()) {
      os << t.varName();
      return;
    }
    if (t.symbol() == consSymbol()) {
      go(t.args()[0]);
      os << " : ";
      go(t.args()[1]);
      return;
    }
    os << t.symbol().name;
    if (!t.args().empty()) {
      os << "(";
      for (std::size_t i = 0; i < t.args().size(); ++i) {
        if (i) os << ", ";
        go(t.args()[i]);
      }
      os << ")";
    }
  };
  if (!node_) return "<invalid>";
  go(*this);
  return os.str();
}

std::string positionToString(const std::vector<int>& pos) {
  if (pos.empty()) return "e";
  std::string out;
  for (std::size_t i = 0; i < pos.size(); ++i) {
    if (i) out += ".";
    out += std::to_string(pos[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------

void Substitution::bind(const Var& v, const Term& t) {
  if (t.sort() != v.sort)
    throw Error(ErrorCode::BadTerm,
                "substitution for '" + v.name + "' must have sort " + to_string(v.sort));
  map_[v] = t;
}

const Term* Substitution::lookup(const Var& v) const {
  auto it = map_.find(v);
  return it == map_.end() ? nullptr : &it->second;
}

Term Substitution::apply(const Term& t) const {
  if (map_.empty()) return t;
  if (t.isVariable()) {
    const Term* bound = lookup(t.var());
    return bound ? *bound : t;
  }
  bool changed = false;
  std::vector<Term> newArgs;
  newArgs.reserve(t.args().size());
  for (const Term& a : t.args()) {
    Term na = apply(a);
    if (na != a) changed = true;
    newArgs.push_back(std::move(na));
  }
  if (!changed) return t;
  return Term::apply(t.symbol(), std::move(newArgs));
}

Substitution Substitution::composedWith(const Substitution& other) const {
  Substitution out;
  for (const auto& [v, t] : map_) out.bind(v, other.apply(t));
  for (const auto& [v, t] : other.map_)
    if (!out.contains(v)) out.bind(v, t);
  return out;
}

// ---------------------------------------------------------------------------

Rule::Rule(Term l, Term r) : lhs(std::move(l)), rhs(std::move(r)) {
  if (!lhs.valid() || !rhs.valid()) throw Error(ErrorCode::BadTerm, "rule with invalid side");
  if (lhs.isVariable())
    throw Error(ErrorCode::BadTerm, "rule left-hand side must not be a variable");
  if (lhs.sort() != rhs.sort())
    throw Error(ErrorCode::BadTerm, "rule sides differ in sort: " + lhs.str() + " = " + rhs.str());
  std::vector<Var> lv = lhs.vars();
  for (const Var& v : rhs.vars()) {
    if (std::find(lv.begin(), lv.end(), v) == lv.end())
      throw Error(ErrorCode::BadTerm,
                  "variable '" + v.name + "' of right-hand side does not occur in left-hand side");
  }
}

std::string Rule::str() const { return lhs.str() + " -> " + rhs.str(); }

namespace {

Term renameCanonical(const Term& t, std::map<Var, Term>& seen, int& dCount, int& sCount) {
  if (t.isVariable()) {
    auto it = seen.find(t.var());
    if (it != seen.end()) return it->second;
    std::string name = t.sort() == Sort::Data ? "d" + std::to_string(++dCount)
                                              : "s" + std::to_string(++sCount);
    Term fresh = Term::variable(name, t.sort());
    seen.emplace(t.var(), fresh);
    return fresh;
  }
  std::vector<Term> args;
  args.reserve(t.args().size());
  for (const Term& a : t.args()) args.push_back(renameCanonical(a, seen, dCount, sCount));
  return Term::apply(t.symbol(), std::move(args));
}

}  // namespace

Rule canonicalizeRule(const Rule& r) {
  std::map<Var, Term> seen;
  int d = 0, s = 0;
  Term l = renameCanonical(r.lhs, seen, d, s);
  Term rr = renameCanonical(r.rhs, seen, d, s);
  return Rule(l, rr);
}

bool sameRuleModuloRenaming(const Rule& a, const Rule& b) {
  return canonicalizeRule(a) == canonicalizeRule(b);
}

Trs Trs::fromRules(std::vector<Rule> rules, std::vector<FunSymbol> extra) {
  Trs trs;
  trs.rules = std::move(rules);
  trs.signature = std::move(extra);
  std::function<void(const Term&)> collect = [&](const Term& t) {
    if (t.isVariable()) return;
    bool known = false;
    for (const FunSymbol& s : trs.signature)
      if (s == t.symbol()) {
        known = true;
        break;
      }
    if (!known) trs.signature.push_back(t.symbol());
    for (const Term& a : t.args()) collect(a);
  };
  for (const Rule& r : trs.rules) {
    collect(r.lhs);
    collect(r.rhs);
  }
  return trs;
}

const FunSymbol* Trs::findSymbol(const std::string& name) const {
  for (const FunSymbol& s : signature)
    if (s.name == name) return &s;
  return nullptr;
}

// ---------------------------------------------------------------------------

namespace {

bool matchInto(const Term& pattern, const Term& subject, Substitution& theta) {
  if (pattern.isVariable()) {
        const Term* bound = theta.lookup(pattern.var());
    if (bound) return *bound == subject;  // non-linear patterns need equal bindings
    if (pattern.sort() != subject.sort()) return false;
    theta.bind(pattern.var(), subject);
    return true;
  }
  if (subject.isVariable()) return false;
  if (pattern.symbol() != subject.symbol()) return false;
  for (std::size_t i = 0; i < pattern.args().size(); ++i)
    if (!matchInto(pattern.args()[i], subject.args()[i], theta)) return false;
  return true;
}

}  // namespace

std::optional<Substitution> match(const Term& pattern, const Term& subject) {
  Substitution theta;
  if (!matchInto(pattern, subject, theta)) return std::nullopt;
  return theta;
}

namespace {

bool unifyInto(Term a, Term b, Substitution& theta) {
  a = theta.apply(a);
  b = theta.apply(b);
  if (a == b) return true;
  if (a.isVariable()) {
    if (b.contains(a.var())) return false;  // occurs-check
    if (a.sort() != b.sort()) return false;
    Substitution single;
    single.bind(a.var(), b);
    theta = theta.composedWith(single);
    return true;
  }
  if (b.isVariable()) return unifyInto(b, a, theta);
  if (a.symbol() != b.symbol()) return false;
  for (std::size_t i = 0; i < a.args().size(); ++i)
    if (!unifyInto(a.args()[i], b.args()[i], theta)) return false;
  return true;
}

}  // namespace

std::optional<Substitution> unify(const Term& t1, const Term& t2) {
  if (t1.sort() != t2.sort()) return std::nullopt;
  Substitution theta;
  if (!unifyInto(t1, t2, theta)) return std::nullopt;
  return theta;
}

// ---------------------------------------------------------------------------

namespace {

std::optional<RewriteStep> tryRulesAt(const Trs& trs, const Term& root, const Term& sub,
                                      const std::vector<int>& pos) {
  for (std::size_t i = 0; i < trs.rules.size(); ++i) {
    const Rule& r = trs.rules[i];
    if (auto theta = match(r.lhs, sub)) {
      Term contracted = theta->apply(r.rhs);
      return RewriteStep{root.replaceAt(pos, contracted), pos, i};
    }
  }
  return std::nullopt;
}

std::optional<RewriteStep> stepInnermost(const Trs& trs, const Term& root, const Term& sub,
                                         std::vector<int>& pos) {
  if (!sub.isVariable()) {
    for (std::size_t i = 0; i < sub.args().size(); ++i) {
      pos.push_back(static_cast<int>(i + 1));
      if (auto st = stepInnermost(trs, root, sub.args()[i], pos)) return st;
      pos.pop_back();
    }
  }
  return tryRulesAt(trs, root, sub, pos);
}

std::optional<RewriteStep> stepOutermost(const Trs& trs, const Term& root, const Term& sub,
                                         std::vector<int>& pos) {
  if (auto st = tryRulesAt(trs, root, sub, pos)) return st;
  if (!sub.isVariable()) {
    for (std::size_t i = 0; i < sub.args().size(); ++i) {
      pos.push_back(static_cast<int>(i + 1));
      if (auto st = stepOutermost(trs, root, sub.args()[i], pos)) return st;
      pos.pop_back();
    }
  }
  return std::nullopt;
}

}  // namespace

std::optional<RewriteStep> rewriteStep(const Trs& trs, const Term& t, Strategy strategy) {
  std::vector<int> pos;
  if (strategy == Strategy::LeftmostInnermost) return stepInnermost(trs, t, t, pos);
  return stepOutermost(trs, t, t, pos);
}

Term rewriteAt(const Trs& trs, const Term& t, const std::vector<int>& pos, std::size_t ruleIndex) {
  if (ruleIndex >= trs.rules.size())
    throw Error(ErrorCode::BadPosition, "rule index out of range");
  const Rule& r = trs.rules[ruleIndex];
  const Term& sub = t.at(pos);
  auto theta = match(r.lhs, sub);
  if (!theta)
    throw Error(ErrorCode::BadTerm, "rule " + std::to_string(ruleIndex) + " does not match at " +
                                        positionToString(pos) + " in " + t.str());
  return t.replaceAt(pos, theta->apply(r.rhs));
}

}  // namespace streamwd
