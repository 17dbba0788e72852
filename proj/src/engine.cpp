#include "streamwd/engine.hpp"

#include <deque>
#include <functional>
#include <set>
#include <sstream>

namespace streamwd {

namespace {

bool cancelled(CancelToken cancel, std::size_t step) {
  return cancel && (step & 1023) == 0 && cancel->load(std::memory_order_relaxed);
}

bool allDataSymbols(const Term& t) {
  if (t.isVariable()) return false;
  if (t.sort() != Sort::Data) return false;
  const std::string& n = t.symbol().name;
  if (n == "head" || n == "tail" || n == ":") return false;
  if (t.symbol().resultSort != Sort::Data) return false;
  for (const Term& a : t.args())
    if (!allDataSymbols(a)) return false;
  return true;
}

}  // namespace

std::string EvalResult::describe() const {
  switch (kind) {
    case Kind::Value: return term.str();
    case Kind::FuelExhausted:
      return "fuel exhausted after " + std::to_string(steps) + " steps at " + term.str();
    case Kind::StuckNonData: return "stuck at non-data normal form " + term.str();
  }
  return "?";
}

EvalResult normalize(const Trs& trs, Term t, Strategy strategy, std::size_t fuel,
                     CancelToken cancel) {
  EvalResult res;
  for (std::size_t step = 0; step < fuel; ++step) {
    if (cancelled(cancel, step)) {
      res.kind = EvalResult::Kind::FuelExhausted;
      res.term = t;
      res.steps = step;
      return res;
    }
    auto st = rewriteStep(trs, t, strategy);
    if (!st) {
      res.steps = step;
      res.term = t;
      res.kind = allDataSymbols(t) ? EvalResult::Kind::Value : EvalResult::Kind::StuckNonData;
      return res;
    }
    t = std::move(st->result);
  }
  res.kind = EvalResult::Kind::FuelExhausted;
  res.term = t;
  res.steps = fuel;
  return res;
}

EvalResult element(const StreamSpec& spec, const ObsSystem& obsSys, const Term& t, std::size_t n,
                   std::size_t fuel, CancelToken cancel) {
  Term cur = t;
  for (std::size_t i = 0; i < n; ++i) cur = Term::apply(tailSymbol(), {cur});
  cur = Term::apply(headSymbol(), {cur});
  return normalize(obsSys.withDataRules(spec), cur, Strategy::LeftmostInnermost, fuel, cancel);
}

PrefixResult prefix(const StreamSpec& spec, const ObsSystem& obsSys, const Term& t,
                    std::size_t count, PrefixStrategy strategy, std::size_t fuelPerElement,
                    CancelToken cancel) {
  PrefixResult out;
  if (strategy == PrefixStrategy::Obs) {
    for (std::size_t n = 0; n < count; ++n) {
      EvalResult r = element(spec, obsSys, t, n, fuelPerElement, cancel);
      if (!r.isValue()) {
        out.failedIndex = n;
        out.diagnostic = r.describe();
        return out;
      }
      out.values.push_back(r.term);
    }
    return out;
  }

  // outermost: rewrite with R_s u R_d until the root is ':', emit, continue.
  // Terms that grow without ever producing ':' (non-productive
  // specifications) are cut off by a size bound so the diagnosis stays fast.
  const std::size_t sizeBound = std::max<std::size_t>(16384, 64 * count + 16 * t.size());
  Trs rsrd = spec.rewriteTrs();
  Trs rdOnly = spec.rdTrs();
  Term cur = t;
  for (std::size_t n = 0; n < count; ++n) {
    std::size_t step = 0;
    while (!(!cur.isVariable() && cur.symbol() == consSymbol())) {
      if (step >= fuelPerElement || cur.size() > sizeBound || cancelled(cancel, step)) {
        out.failedIndex = n;
        out.diagnostic = "fuel exhausted before a head constructor appeared (term of size " +
                         std::to_string(cur.size()) + " after " + std::to_string(step) +
                         " steps; the term is probably not productive)";
        return out;
      }
      auto st = rewriteStep(rsrd, cur, Strategy::LeftmostOutermost);
      if (!st) {
        out.failedIndex = n;
        out.diagnostic = "normal form reached without a head constructor: " + cur.str();
        return out;
      }
      cur = std::move(st->result);
      ++step;
    }
    EvalResult head = normalize(rdOnly, cur.args()[0], Strategy::LeftmostInnermost,
                                fuelPerElement, cancel);
    if (!head.isValue()) {
      out.failedIndex = n;
      out.diagnostic = "head element did not normalize to a data value: " + head.describe();
      return out;
    }
    out.values.push_back(head.term);
    cur = cur.args()[1];
  }
  return out;
}

// ---------------------------------------------------------------------------

std::string LoopWitness::str() const {
  std::ostringstream os;
  os << start.str();
  Term cur = start;
  for (const auto& [rule, pos] : trace)
    os << " -> (rule " << rule << " at " << positionToString(pos) << ")";
  os << " -> " << final.str() << " containing an instance of the start at "
     << positionToString(contextPosition);
  return os.str();
}

namespace {

// pre-order positions of all subterms
void allPositions(const Term& t, std::vector<int>& pos, std::vector<std::vector<int>>& out) {
  out.push_back(pos);
  if (t.isVariable()) return;
  for (std::size_t i = 0; i < t.args().size(); ++i) {
    pos.push_back(static_cast<int>(i + 1));
    allPositions(t.args()[i], pos, out);
    pos.pop_back();
  }
}

std::optional<std::vector<int>> findSeedInstance(const Term& seed, const Term& t) {
  std::vector<std::vector<int>> positions;
  std::vector<int> pos;
  allPositions(t, pos, positions);
  for (const std::vector<int>& p : positions) {
    const Term& sub = t.at(p);
    if (sub.sort() != seed.sort()) continue;
    if (match(seed, sub)) return p;
  }
  return std::nullopt;
}

}  // namespace

std::optional<LoopWitness> findLoop(const Trs& trs, const std::vector<Term>& seeds,
                                    std::size_t maxDepth, std::size_t maxWidth,
                                    CancelToken cancel) {
  std::size_t tick = 0;
  for (const Term& seed : seeds) {
    struct Entry {
      Term term;
      std::vector<std::pair<std::size_t, std::vector<int>>> trace;
    };
    std::deque<Entry> frontier;
    frontier.push_back({seed, {}});
    std::set<Term> visited{seed};

    for (std::size_t depth = 0; depth < maxDepth && !frontier.empty(); ++depth) {
      std::deque<Entry> next;
      for (const Entry& e : frontier) {
        if (cancelled(cancel, ++tick)) return std::nullopt;
        // every one-step successor, positions in pre-order, rules in index order
        std::vector<std::vector<int>> positions;
        std::vector<int> p;
        allPositions(e.term, p, positions);
        for (const std::vector<int>& pos : positions) {
          const Term& sub = e.term.at(pos);
          for (std::size_t r = 0; r < trs.rules.size(); ++r) {
            auto theta = match(trs.rules[r].lhs, sub);
            if (!theta) continue;
            Term succ = e.term.replaceAt(pos, theta->apply(trs.rules[r].rhs));
            Entry se{succ, e.trace};
            se.trace.emplace_back(r, pos);
            if (auto where = findSeedInstance(seed, succ)) {
              LoopWitness w;
              w.start = seed;
              w.trace = std::move(se.trace);
              w.final = succ;
              w.contextPosition = *where;
              return w;
            }
            if (visited.insert(succ).second && next.size() < maxWidth) next.push_back(std::move(se));
          }
        }
      }
      frontier = std::move(next);
    }
  }
  return std::nullopt;
}

bool replayLoopWitness(const Trs& trs, const LoopWitness& w) {
  try {
    Term cur = w.start;
    for (const auto& [rule, pos] : w.trace) cur = rewriteAt(trs, cur, pos, rule);
    if (cur != w.final) return false;
    const Term& sub = cur.at(w.contextPosition);
    return match(w.start, sub).has_value();
  } catch (const Error&) {
    return false;
  }
}

std::vector<Term> standardLoopSeeds(const StreamSpec& spec, const ObsSystem& obsSys) {
  std::vector<Term> seeds;
  for (const FunSymbol& f : spec.sigmaS) {
    std::string name = f.name;
    auto it = obsSys.renames.find(name);
    if (it != obsSys.renames.end()) name = it->second;
    const FunSymbol* sym = obsSys.trs.findSymbol(name);
    FunSymbol use = sym ? *sym : f;
    std::vector<Term> args;
    int d = 0, s = 0;
    for (Sort so : use.argSorts) {
      if (so == Sort::Data)
        args.push_back(Term::variable("x" + std::to_string(++d), Sort::Data));
      else
        args.push_back(Term::variable("s" + std::to_string(++s), Sort::Stream));
    }
    Term base = Term::apply(use, args);
    seeds.push_back(Term::apply(headSymbol(), {base}));
    seeds.push_back(Term::apply(tailSymbol(), {base}));
  }
  return seeds;
}

}  // namespace streamwd
