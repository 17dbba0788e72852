#pragma once

// Rewriting strategies, the element/prefix semantics of stream terms, and
// bounded loop search as non-termination evidence.

#include <atomic>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "streamwd/spec.hpp"
#include "streamwd/term.hpp"
#include "streamwd/transform.hpp"

namespace streamwd {

inline constexpr std::size_t kDefaultFuel = 1000000;

// Cooperative cancellation; checked every 1024 steps by long-running calls.
using CancelToken = const std::atomic<bool>*;

struct EvalResult {
  enum class Kind { Value, FuelExhausted, StuckNonData };
  Kind kind = Kind::Value;
  Term term;                // the value, or the last/stuck term
  std::size_t steps = 0;

  bool isValue() const { return kind == Kind::Value; }
  std::string describe() const;
};

// Iterates rewriteStep until a normal form or fuel runs out. Value only when
// the normal form is a ground data term built solely from data symbols.
EvalResult normalize(const Trs& trs, Term t, Strategy strategy, std::size_t fuel = kDefaultFuel,
                     CancelToken cancel = nullptr);

// The n-th element of ground stream term t: the normal form of
// head(tail^n(t)) with respect to Obs(R_s) u R_d, leftmost-innermost.
EvalResult element(const StreamSpec& spec, const ObsSystem& obsSys, const Term& t, std::size_t n,
                   std::size_t fuel = kDefaultFuel, CancelToken cancel = nullptr);

enum class PrefixStrategy { Obs, Outermost };

struct PrefixResult {
  std::vector<Term> values;  // elements of D actually computed
  // Diagnostics when not all elements were computed.
  std::optional<std::size_t> failedIndex;
  std::string diagnostic;

  bool complete(std::size_t n) const { return values.size() == n; }
};

// First `count` elements of t. Obs mode iterates `element`; outermost mode
// rewrites leftmost-outermost with R_s u R_d, emitting the head as soon as
// the root becomes ':' and continuing on the tail.
PrefixResult prefix(const StreamSpec& spec, const ObsSystem& obsSys, const Term& t,
                    std::size_t count, PrefixStrategy strategy,
                    std::size_t fuelPerElement = kDefaultFuel, CancelToken cancel = nullptr);

struct LoopWitness {
  Term start;
  std::vector<std::pair<std::size_t, std::vector<int>>> trace;  // (rule, position) steps
  Term final;
  std::vector<int> contextPosition;  // where an instance of start recurs in final

  std::string str() const;
};

// Breadth-first forward closure from each seed, up to maxDepth steps and
// retaining at most maxWidth frontier terms; returns the first term (in
// exploration order) containing an instance of its seed. Absence is not a
// termination proof.
std::optional<LoopWitness> findLoop(const Trs& trs, const std::vector<Term>& seeds,
                                    std::size_t maxDepth = 10, std::size_t maxWidth = 10000,
                                    CancelToken cancel = nullptr);

// Replays the witness trace; true iff it reproduces `final` and an instance
// of `start` occurs at `contextPosition`.
bool replayLoopWitness(const Trs& trs, const LoopWitness& w);

// head(f(x1..,s1..)) and tail(f(..)) seeds for every stream symbol.
std::vector<Term> standardLoopSeeds(const StreamSpec& spec, const ObsSystem& obsSys);

}  // namespace streamwd
