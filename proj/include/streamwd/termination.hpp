#pragma once

// A sound, incomplete termination prover for the observational systems:
// dependency pairs, estimated dependency graph, SCC decomposition, and a
// search for linear polynomial interpretations over the naturals with small
// coefficients. Proofs are emitted as certificates that an independent
// checker re-verifies (see check_certificate; it shares only term-core with
// the search).

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "streamwd/term.hpp"

namespace streamwd {

struct DependencyPair {
  Term lhs;  // marked: root symbol f replaced by f#
  Term rhs;
  std::size_t originRule = 0;

  bool operator==(const DependencyPair& o) const { return lhs == o.lhs && rhs == o.rhs; }
  std::string str() const { return lhs.str() + " -> " + rhs.str(); }
};

// Marked-root pairs, one per defined-rooted subterm of each right-hand side
// (pre-order, duplicates removed), in rule order.
std::vector<DependencyPair> dependencyPairs(const Trs& trs);

// Estimated dependency graph: edge p -> q iff cap(p.rhs) unifies with a
// renamed copy of q.lhs, where cap replaces defined-rooted subterms below the
// marked root by fresh variables.
std::vector<std::vector<std::size_t>> estimatedGraph(const Trs& trs,
                                                     const std::vector<DependencyPair>& pairs);

struct LinearInterpretation {
  // per symbol f of arity k: coefficients c0..ck, naturals
  std::map<std::string, std::vector<std::int64_t>> coeffs;
};

struct CertificateStep {
  std::vector<std::size_t> sccPairs;      // ascending pair indices
  std::vector<std::size_t> usableRules;   // ascending rule indices into the trs
  LinearInterpretation interpretation;
  std::vector<std::size_t> strictPairs;   // removed pairs, subset of sccPairs
};

struct TerminationCertificate {
  std::vector<CertificateStep> steps;
  std::string str() const;
};

struct ProverConfig {
  std::int64_t coeffMax = 2;
  double timeBudgetSeconds = 10.0;
  std::size_t maxPairs = 512;
};

enum class UnknownReason { SearchExhausted, TimeBudget, GraphTooLarge };

struct Proved {
  TerminationCertificate certificate;
};
struct Unknown {
  UnknownReason reason = UnknownReason::SearchExhausted;
  std::string detail;
};

using ProveResult = std::variant<Proved, Unknown>;

const char* to_string(UnknownReason r);

// Pipeline: pairs, estimated graph, SCCs; per SCC a deterministic
// lexicographic search for an interpretation making the usable rules and all
// pairs weakly decreasing and at least one pair strictly decreasing; strict
// pairs are removed and the residual re-decomposed. Proved only when no
// cycles remain.
ProveResult proveTermination(const Trs& trs, const ProverConfig& config = {});

struct CheckValid {};
struct CheckInvalid {
  std::size_t step = 0;  // 0-based failing step; steps.size() for final residual
  std::string reason;
};
using CheckResult = std::variant<CheckValid, CheckInvalid>;

// Independent verification: recomputes pairs and graph, then per step checks
// the claimed SCC, the usable-rule coverage, and every weak/strict polynomial
// inequality by coefficient comparison, and finally residual-cycle emptiness.
CheckResult checkCertificate(const Trs& trs, const TerminationCertificate& cert);

}  // namespace streamwd
