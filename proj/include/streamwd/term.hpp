#pragma once

// Sorted first-order terms over a two-sorted signature (data / stream),
// plus matching, unification and single-step rewriting. Everything here is
// immutable after construction and safe to share across threads.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace streamwd {

enum class Sort : std::uint8_t { Data, Stream };

const char* to_string(Sort s);

// ---------------------------------------------------------------------------
// Errors

enum class ErrorCode {
  BadTerm,          // ill-sorted construction, bad arity, invalid rule
  BadPosition,
  UniverseOverflow,
  FuelExhausted,
  NotOrthogonal,
  ShapeError,
  NotUnfoldable,
  SymbolClash,
  VariableEscape,
  NonBooleanData,
  NotComputable,
  ReservedName,
  Usage,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string msg) : std::runtime_error(std::move(msg)), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// ---------------------------------------------------------------------------
// Signature

struct FunSymbol {
  std::string name;
  std::vector<Sort> argSorts;
  Sort resultSort = Sort::Data;

  std::size_t arity() const { return argSorts.size(); }
  bool operator==(const FunSymbol& o) const {
    return name == o.name && argSorts == o.argSorts && resultSort == o.resultSort;
  }
  bool operator!=(const FunSymbol& o) const { return !(*this == o); }
};

// The built-in stream constructor ':' (printed as `cons` in TPDB exports).
const FunSymbol& consSymbol();
// Observation symbols introduced by the Obs construction.
const FunSymbol& headSymbol();
const FunSymbol& tailSymbol();

// ---------------------------------------------------------------------------
// Terms

struct Var {
  std::string name;
  Sort sort = Sort::Data;

  bool operator==(const Var& o) const { return name == o.name && sort == o.sort; }
  bool operator<(const Var& o) const {
    if (name != o.name) return name < o.name;
    return sort < o.sort;
  }
};

class Term {
 public:
  Term() = default;  // empty; only as a placeholder, never a valid term

  static Term variable(std::string name, Sort sort);
  static Term variable(const Var& v) { return variable(v.name, v.sort); }
  // Checks arity and argument sorts; throws Error(BadTerm) on violation.
  static Term apply(FunSymbol sym, std::vector<Term> args = {});
  static Term cons(Term head, Term tail);

  bool valid() const { return node_ != nullptr; }
  bool isVariable() const;
  Sort sort() const;
  const std::string& varName() const;
  Var var() const;
  const FunSymbol& symbol() const;
  const std::vector<Term>& args() const;

  std::size_t size() const;  // number of nodes
  std::size_t hash() const;

  bool operator==(const Term& o) const;
  bool operator!=(const Term& o) const { return !(*this == o); }
  // Total order (by size, then structure); used for deterministic sets.
  bool operator<(const Term& o) const;

  // Subterm access by position: a position is a path of 1-based argument
  // indices from the root; the empty path denotes the whole term.
  const Term& at(const std::vector<int>& pos) const;            // throws BadPosition
  Term replaceAt(const std::vector<int>& pos, const Term& t) const;

  // Collects variables in order of first occurrence (pre-order).
  void collectVars(std::vector<Var>& out) const;
  std::vector<Var> vars() const;
  bool isGround() const;
  bool contains(const Var& v) const;
  bool containsSymbol(const std::string& name) const;

  std::string str() const;  // infix ':' notation, e.g. "zip(x : sigma, tau)"

 private:
  struct Node;
  explicit Term(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

std::string positionToString(const std::vector<int>& pos);  // "e" for the root

// ---------------------------------------------------------------------------
// Substitutions

class Substitution {
 public:
  Substitution() = default;

  // Binding must be sort-preserving; throws Error(BadTerm) otherwise.
  void bind(const Var& v, const Term& t);
  const Term* lookup(const Var& v) const;
  bool contains(const Var& v) const { return lookup(v) != nullptr; }
  std::size_t size() const { return map_.size(); }
  bool empty() const { return map_.empty(); }
  const std::map<Var, Term>& entries() const { return map_; }

  Term apply(const Term& t) const;

  // this ; then other (compose ranges through `other`).
  Substitution composedWith(const Substitution& other) const;

 private:
  std::map<Var, Term> map_;
};

// ---------------------------------------------------------------------------
// Rules and rule sets

struct Rule {
  Term lhs;
  Term rhs;

  // Throws Error(BadTerm) unless: lhs is not a variable, both sides have the
  // same sort, and every rhs variable occurs in the lhs.
  Rule(Term l, Term r);

  bool operator==(const Rule& o) const { return lhs == o.lhs && rhs == o.rhs; }
  std::string str() const;
};

// Renames the rule's variables to canonical names (d1,d2,.. / s1,s2,.. in
// order of first occurrence); used for alpha-equality comparisons.
Rule canonicalizeRule(const Rule& r);
bool sameRuleModuloRenaming(const Rule& a, const Rule& b);

struct Trs {
  std::vector<Rule> rules;
  std::vector<FunSymbol> signature;  // every symbol used in rules plus extras

  static Trs fromRules(std::vector<Rule> rules, std::vector<FunSymbol> extra = {});
  const FunSymbol* findSymbol(const std::string& name) const;
};

// ---------------------------------------------------------------------------
// Matching / unification / rewriting

// One-sided syntactic matching: returns theta with pattern*theta == subject.
std::optional<Substitution> match(const Term& pattern, const Term& subject);

// Most general unifier with occurs-check.
std::optional<Substitution> unify(const Term& t1, const Term& t2);

enum class Strategy { LeftmostInnermost, LeftmostOutermost };

struct RewriteStep {
  Term result;
  std::vector<int> position;
  std::size_t ruleIndex = 0;
};

// Contracts one redex at the position selected by the strategy, or nullopt if
// t is a normal form. Rule choice at a position is by lowest index.
std::optional<RewriteStep> rewriteStep(const Trs& trs, const Term& t, Strategy strategy);

// Applies rule `ruleIndex` at `pos`; throws Error(BadPosition/BadTerm) if the
// rule does not match there. Used for replaying recorded traces.
Term rewriteAt(const Trs& trs, const Term& t, const std::vector<int>& pos, std::size_t ruleIndex);

}  // namespace streamwd
