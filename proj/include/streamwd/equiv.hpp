#pragma once

// Checker for equational proof scripts over the semantic congruence that
// extends rule convertibility with the head/tail/cons equations and case
// analysis over the data universe, plus the preservation checker for rule
// replacement and the anchor-suggestion heuristic.
//
// Proof script text format:
//
//   lemma <name> : <term> ~ <term> ;  <step>*  qed ;
//   prove <term> ~ <term> ;           <step>*  qed ;
//
//   step := "by" "eq" <ruleName> <fwd|bwd> "at" <pos> [with] ";"
//         | "by" "E1"|"E2"|"E3" <fwd|bwd> "at" <pos> [with] ";"
//         | "by" "lemma" <name> <fwd|bwd> "at" <pos> [with] ";"
//         | "cases" <var> [":" <term> "~" <term>] ["at" <pos>] [with]
//               "{" (<dataterm> ":" "{" <step>* "}")+ "}" ";"
//         | "thus" <term> ";"
//         | "sym" ";"
//   with := "with" "{" (<var> ":=" <term> ("," <var> ":=" <term>)*)? "}"
//   pos  := "e" | <num> ("." <num>)*
//
// Rule names are `<lhs-root>.<k>` (k-th rule with that root, in file order).
// E1: head(x:s) = x, E2: tail(x:s) = s, E3: s = head(s) : tail(s), where
// `tail` is the user's tail symbol: the scripts require a rule T(x:s) = s in
// the stream rules, and reject E-steps with a hint when none exists.

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "streamwd/spec.hpp"
#include "streamwd/term.hpp"
#include "streamwd/transform.hpp"

namespace streamwd {

enum class StepDir { Fwd, Bwd };

struct NamedBinding {
  std::string name;
  Term value;
};

struct EqStep {
  std::string ruleName;
  StepDir dir = StepDir::Fwd;
  std::vector<int> position;
  std::vector<NamedBinding> bindings;
};

struct EStep {
  int which = 1;  // 1, 2 or 3
  StepDir dir = StepDir::Fwd;
  std::vector<int> position;
  std::vector<NamedBinding> bindings;
};

struct LemmaStep {
  std::string lemmaName;
  StepDir dir = StepDir::Fwd;
  std::vector<int> position;
  std::vector<NamedBinding> bindings;
};

struct Thus {
  Term term;
};

struct SymMarker {};

struct Step;

struct CaseBranch {
  Term label;  // element of D
  std::vector<Step> steps;
};

struct CaseSplit {
  Var variable;
  // Long form: proves `from ~ to` (both may mention `variable` and other
  // free variables) and applies it at `position` under `bindings`.
  // Short form (explicitFromTo == false): from is the whole current term,
  // to is the common final term of the branches.
  bool explicitFromTo = false;
  Term from;
  Term to;
  std::vector<int> position;
  std::vector<NamedBinding> bindings;
  std::vector<CaseBranch> branches;
};

struct Step {
  std::variant<EqStep, EStep, LemmaStep, CaseSplit, Thus, SymMarker> v;
};

struct ProofScript {
  std::string name;  // empty for `prove` blocks
  Term goalLhs;
  Term goalRhs;
  std::vector<Step> steps;
};

struct ProofFile {
  std::vector<ProofScript> lemmas;  // checked and usable in file order
  std::vector<ProofScript> proofs;
};

ProofFile parseProofFile(const StreamSpec& spec, const std::string& text);
ProofFile parseProofFileAt(const StreamSpec& spec, const std::string& path);

struct ProofValid {};
struct ProofInvalid {
  std::string location;  // e.g. "lemma headg, step 2" or "step 5, case 1, step 1"
  std::string reason;
};
using ProofResult = std::variant<ProofValid, ProofInvalid>;

bool valid(const ProofResult& r);
std::string describe(const ProofResult& r);

// Replays one script left-to-right. `lemmas` are previously checked scripts
// available to lemma steps.
ProofResult checkProof(const StreamSpec& spec, const ProofScript& script,
                       const std::vector<ProofScript>& lemmas = {});

// Checks every lemma and proof of the file in order; the first failure wins.
ProofResult checkProofFile(const StreamSpec& spec, const ProofFile& file);

// ---------------------------------------------------------------------------

enum class ObligationStatus { Proved, Missing, Failed };

struct ObligationResult {
  Term lhs;
  Term rhs;
  bool aUnderB = false;  // true: a rule of A proved in B; false: B-rule in A
  std::string ruleName;
  ObligationStatus status = ObligationStatus::Missing;
  std::string detail;
};

struct PreservationVerdict {
  std::vector<ObligationResult> results;
  bool preserved = false;
  std::string str() const;
};

// Matches each non-shared rule of either spec with a script from the
// corresponding file (goals compared modulo variable renaming and side
// swapping) and checks it against the opposite spec.
PreservationVerdict checkPreservation(const StreamSpec& specA, const StreamSpec& specB,
                                      const ProofFile& scriptsAB, const ProofFile& scriptsBA);

// ---------------------------------------------------------------------------

struct AnchorSuggestion {
  std::string freshName;
  Rule anchorEquation;                     // c = d0 : ... : d(n-1) : c'
  Rule definition;                         // c' = tail^n(c)
  std::vector<PendingObligation> obligations;
  std::string str() const;
};

// Computes the first n elements of constant c and proposes the anchored
// replacement; throws Error(NotComputable) when an element has no value.
// Advisory only; the input spec is never changed.
AnchorSuggestion suggestAnchor(const StreamSpec& spec, const std::string& constantName,
                               std::size_t n, std::size_t fuel = 1000000);

// Bounded breadth-first search for a proof script (convenience, not part of
// any soundness claim; found scripts are re-checked by checkProof).
std::optional<ProofScript> searchScript(const StreamSpec& spec, const Term& lhs, const Term& rhs,
                                        std::size_t maxDepth = 6, std::size_t maxWidth = 2000);

// The user tail symbol: a unary stream symbol with a rule T(x:s) = s.
std::optional<FunSymbol> detectTailSymbol(const StreamSpec& spec);

}  // namespace streamwd
