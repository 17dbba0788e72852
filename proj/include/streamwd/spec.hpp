#pragma once

// The stream-specification quadruple (sigma_d, sigma_s, R_d, R_s), the finite
// data universe D of ground R_d-normal forms, and the properness validator.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "streamwd/term.hpp"

namespace streamwd {

struct StreamSpec {
  std::vector<FunSymbol> sigmaD;  // all-data symbols, in declaration order
  std::vector<FunSymbol> sigmaS;  // stream-result symbols, in declaration order
  std::vector<Rule> rd;           // data rules
  std::vector<Rule> rs;           // stream rules

  const FunSymbol* findData(const std::string& name) const;
  const FunSymbol* findStream(const std::string& name) const;
  const FunSymbol* findSymbol(const std::string& name) const;  // either set
  bool hasSymbol(const std::string& name) const { return findSymbol(name) != nullptr; }

  Trs rdTrs() const;                 // R_d as a TRS over sigmaD
  Trs rewriteTrs() const;            // R_s followed by R_d, for direct execution

  // "<root>.<k>": k-th rule (1-based) whose left-hand side is rooted by that
  // symbol, counting data and stream rules separately in source order.
  std::string ruleName(bool dataRule, std::size_t index) const;
  // Resolves a rule name; returns (isData, index) or nullopt.
  std::optional<std::pair<bool, std::size_t>> findRule(const std::string& name) const;

  bool operator==(const StreamSpec& o) const;
};

struct DataUniverse {
  std::vector<Term> elements;  // distinct R_d-normal forms, size-then-lex order
  std::size_t cap = 0;

  bool containsTerm(const Term& t) const;
  std::optional<std::size_t> indexOf(const Term& t) const;
};

inline constexpr std::size_t kDefaultUniverseCap = 4096;

// Enumerates ground data terms by increasing size, normalizing each with R_d.
// Throws Error(UniverseOverflow) when more than `cap` distinct normal forms
// appear, Error(FuelExhausted) if some normalization does not finish, and
// Error(NotOrthogonal) if R_d is not orthogonal.
DataUniverse dataUniverse(const std::vector<FunSymbol>& sigmaD, const std::vector<Rule>& rd,
                          std::size_t cap = kDefaultUniverseCap);

enum class Severity { Warning, ErrorFinding };

struct Finding {
  Severity severity = Severity::ErrorFinding;
  std::string where;    // rule name or symbol name
  std::string message;
};

enum class SpecVerdict { Proper, Improper, IllFormed };

struct ValidationReport {
  SpecVerdict verdict = SpecVerdict::Proper;
  std::vector<Finding> findings;
  std::optional<DataUniverse> universe;  // absent when D could not be computed

  bool proper() const { return verdict == SpecVerdict::Proper; }
  std::size_t errorCount() const;
  std::string str() const;
};

// Checks, in order: (a) well-sortedness and structural classification of all
// rules; (b) left-linearity and non-overlap of R_s u R_d; (c) the left-hand
// side shape restriction for stream rules; (d) exhaustiveness over D;
// (e) stuck ground data terms in D (warning only). All failures are reported;
// nothing is thrown.
ValidationReport validate(const StreamSpec& spec, std::size_t universeCap = kDefaultUniverseCap);

// True iff every data-sorted subterm of an R_s left-hand side is a variable.
// Assumes the spec has been validated proper.
bool isDataIndependent(const StreamSpec& spec);

// Left-linearity and critical-pair emptiness over the given rule list; one
// description per violation. `names` labels the rules in error messages.
std::vector<std::string> orthogonalityViolations(const std::vector<Rule>& rules,
                                                 const std::vector<std::string>& names);

}  // namespace streamwd
