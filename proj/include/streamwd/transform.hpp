#pragma once

// Syntactic transformations on stream specifications: the guard-removal step
// P, the observational variant Obs, unfolding through fresh auxiliary
// symbols, definition extension, rule replacement with proof obligations,
// and self-equality goal generation.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "streamwd/spec.hpp"
#include "streamwd/term.hpp"

namespace streamwd {

class FreshNamer {
 public:
  explicit FreshNamer(std::set<std::string> reserved) : reserved_(std::move(reserved)) {}
  explicit FreshNamer(const StreamSpec& spec);

  // Returns `base`, primed with "'" until unused, and reserves the result.
  std::string fresh(const std::string& base);
  void reserve(const std::string& name) { reserved_.insert(name); }

 private:
  std::set<std::string> reserved_;
};

struct ObsRuleOrigin {
  bool builtin = false;
  std::size_t rsIndex = 0;  // meaningful when !builtin
};

struct ObsSystem {
  Trs trs;                                    // observation rules only (no R_d)
  std::vector<ObsRuleOrigin> origin;          // parallel to trs.rules
  std::map<std::string, std::string> renames; // user head/tail -> head0/tail0

  // Observation rules followed by the data rules, for execution and export.
  Trs withDataRules(const StreamSpec& spec) const;
};

// Guard removal: each left-hand side stream argument x:sigma becomes sigma;
// in the right-hand side x becomes head(sigma) and sigma becomes tail(sigma).
std::vector<Rule> pTransform(const std::vector<Rule>& rs);

// The observational variant. Requires a proper spec; a user `tail`/`head`
// symbol is renamed tail0/head0 first (recorded in the result).
ObsSystem obs(const StreamSpec& spec);

// Unfolds symbol `f` at stream position `i` (1-based among f's stream
// arguments) through a fresh symbol named `<f>_u<i>` (primed until unused).
StreamSpec unfold(const StreamSpec& spec, const std::string& f, int i);

// Repeats unfold until no rule qualifies anywhere.
StreamSpec unfoldAll(const StreamSpec& spec);

// Adds fresh symbol g and the defining equation g(x1..xk, s1..sm) = defLhs,
// with g's argument variables bound to defLhs's variables in order of first
// occurrence (data first, then stream).
StreamSpec addDefinition(const StreamSpec& spec, const FunSymbol& g, const Term& defLhs);

struct PendingObligation {
  Term lhs;
  Term rhs;
  bool underNew = false;  // true: prove lhs ~ rhs in the *new* rule set
  std::string sourceRule; // display name of the originating rule
};

struct ReplacementResult {
  StreamSpec spec;
  std::vector<PendingObligation> obligations;
};

// Swaps R_s for newRs and lists both directions' proof obligations for the
// non-shared rules (matching is modulo variable renaming).
ReplacementResult replaceRules(const StreamSpec& spec, const std::vector<Rule>& newRs);

struct Goal {
  Term lhs;
  Term rhs;
};

struct SelfEqualityGoals {
  StreamSpec doubled;       // original plus primed copies of all stream symbols
  std::vector<Goal> goals;  // f(xs, ss) == f'(xs, ss) per stream symbol
};

SelfEqualityGoals makeSelfEqualityGoals(const StreamSpec& spec);

// Goals text format: the doubled spec in spec syntax followed by lines
//   goal <term> == <term> ;
std::string renderGoalsFile(const SelfEqualityGoals& g);
SelfEqualityGoals parseGoalsFile(const std::string& text);

namespace detail {
class Lexer;
}

// Sort-directed term parsing shared by the goals and proof-script readers:
// identifiers that are not declared symbols become variables whose sorts are
// resolved from the position they occur in; `head(t)` denotes the
// observation symbol.
Term parseGoalTerm(const StreamSpec& spec, detail::Lexer& lex,
                   std::map<std::string, Sort>& varSorts, std::optional<Sort> expected);

}  // namespace streamwd
