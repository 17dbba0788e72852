#include "streamwd/spec.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace streamwd {

const FunSymbol* StreamSpec::findData(const std::string& name) const {
  for (const FunSymbol& s : sigmaD)
    if (s.name == name) return &s;
  return nullptr;
}

const FunSymbol* StreamSpec::findStream(const std::string& name) const {
  for (const FunSymbol& s : sigmaS)
    if (s.name == name) return &s;
  return nullptr;
}

const FunSymbol* StreamSpec::findSymbol(const std::string& name) const {
  if (const FunSymbol* s = findData(name)) return s;
  return findStream(name);
}

Trs StreamSpec::rdTrs() const { return Trs::fromRules(rd, sigmaD); }

Trs StreamSpec::rewriteTrs() const {
  std::vector<Rule> rules = rs;
  rules.insert(rules.end(), rd.begin(), rd.end());
  std::vector<FunSymbol> sig = sigmaD;
  sig.insert(sig.end(), sigmaS.begin(), sigmaS.end());
  sig.push_back(consSymbol());
  return Trs::fromRules(std::move(rules), std::move(sig));
}

std::string StreamSpec::ruleName(bool dataRule, std::size_t index) const {
  const std::vector<Rule>& rules = dataRule ? rd : rs;
  if (index >= rules.size()) return "?";
  const std::string& root = rules[index].lhs.symbol().name;
  std::size_t k = 0;
  for (std::size_t i = 0; i <= index; ++i)
    if (rules[i].lhs.symbol().name == root) ++k;
  return root + "." + std::to_string(k);
}

std::optional<std::pair<bool, std::size_t>> StreamSpec::findRule(const std::string& name) const {
  for (std::size_t i = 0; i < rs.size(); ++i)
    if (ruleName(false, i) == name) return std::make_pair(false, i);
  for (std::size_t i = 0; i < rd.size(); ++i)
    if (ruleName(true, i) == name) return std::make_pair(true, i);
  return std::nullopt;
}

bool StreamSpec::operator==(const StreamSpec& o) const {
  return sigmaD == o.sigmaD && sigmaS == o.sigmaS && rd == o.rd && rs == o.rs;
}

// ---------------------------------------------------------------------------
// Data universe

bool DataUniverse::containsTerm(const Term& t) const {
  return std::find(elements.begin(), elements.end(), t) != elements.end();
}

std::optional<std::size_t> DataUniverse::indexOf(const Term& t) const {
  for (std::size_t i = 0; i < elements.size(); ++i)
    if (elements[i] == t) return i;
  return std::nullopt;
}

namespace {

constexpr std::size_t kRdFuel = 1000000;

// Innermost normalization used while building D; throws on fuel exhaustion.
Term normalizeData(const Trs& rd, Term t) {
  for (std::size_t step = 0; step < kRdFuel; ++step) {
    auto st = rewriteStep(rd, t, Strategy::LeftmostInnermost);
    if (!st) return t;
    t = std::move(st->result);
  }
  throw Error(ErrorCode::FuelExhausted,
              "data rules did not normalize " + t.str() + " within " + std::to_string(kRdFuel) +
                  " steps; R_d is presumed non-terminating");
}

}  // namespace

std::vector<std::string> orthogonalityViolations(const std::vector<Rule>& rules,
                                                 const std::vector<std::string>& names) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < rules.size(); ++i) {
    std::vector<Var> seen;
    std::vector<Var> dup;
    std::function<void(const Term&)> scan = [&](const Term& t) {
      if (t.isVariable()) {
        Var v = t.var();
        if (std::find(seen.begin(), seen.end(), v) != seen.end()) {
          if (std::find(dup.begin(), dup.end(), v) == dup.end()) dup.push_back(v);
        } else {
          seen.push_back(v);
        }
        return;
      }
      for (const Term& a : t.args()) scan(a);
    };
    scan(rules[i].lhs);
    for (const Var& v : dup)
      out.push_back("rule " + names[i] + " is not left-linear: variable '" + v.name +
                    "' repeats in the left-hand side");
  }

  // Rename rule j's variables apart before unifying.
  auto renamed = [](const Rule& r, const std::string& suffix) {
    Substitution theta;
    for (const Var& v : r.lhs.vars())
      theta.bind(v, Term::variable(v.name + suffix, v.sort));
    return theta.apply(r.lhs);
  };

  for (std::size_t i = 0; i < rules.size(); ++i) {
    // Positions of non-variable subterms of lhs_i, pre-order.
    std::vector<std::vector<int>> positions;
    std::function<void(const Term&, std::vector<int>&)> walk = [&](const Term& t,
                                                                   std::vector<int>& pos) {
      if (t.isVariable()) return;
      positions.push_back(pos);
      for (std::size_t k = 0; k < t.args().size(); ++k) {
        pos.push_back(static_cast<int>(k + 1));
        walk(t.args()[k], pos);
        pos.pop_back();
      }
    };
    std::vector<int> pos;
    walk(rules[i].lhs, pos);

    for (std::size_t j = 0; j < rules.size(); ++j) {
      Term lj = renamed(rules[j], "'#r");
      for (const std::vector<int>& p : positions) {
        if (p.empty() && i == j) continue;  // a rule trivially overlaps itself at the root
        const Term& sub = rules[i].lhs.at(p);
        if (sub.sort() != lj.sort()) continue;
        if (unify(sub, lj)) {
          out.push_back("rules " + names[i] + " and " + names[j] + " overlap at position " +
                        positionToString(p) + " of " + rules[i].lhs.str());
        }
      }
    }
  }
  return out;
}

DataUniverse dataUniverse(const std::vector<FunSymbol>& sigmaD, const std::vector<Rule>& rd,
                          std::size_t cap) {
  if (cap < 1) throw Error(ErrorCode::UniverseOverflow, "universe cap must be at least 1");
  std::vector<std::string> names;
  for (std::size_t i = 0; i < rd.size(); ++i) names.push_back("R_d#" + std::to_string(i + 1));
  auto violations = orthogonalityViolations(rd, names);
  if (!violations.empty())
    throw Error(ErrorCode::NotOrthogonal, "data rules are not orthogonal: " + violations.front());

  Trs rdTrs = Trs::fromRules(rd, sigmaD);

  DataUniverse uni;
  uni.cap = cap;
  std::set<Term> known;
  auto addNormalForm = [&](const Term& nf) -> bool {
    if (known.count(nf)) return false;
    if (known.size() + 1 > cap)
      throw Error(ErrorCode::UniverseOverflow,
                  "more than " + std::to_string(cap) +
                      " distinct data normal forms; D is presumed infinite");
    known.insert(nf);
    return true;
  };

  // terms by size; bySize[k] holds all ground data terms with exactly k nodes
  std::vector<std::vector<Term>> bySize(2);
  auto termsOfSize = [&](std::size_t sz) -> const std::vector<Term>& {
    while (bySize.size() <= sz) bySize.push_back({});
    if (!bySize[sz].empty() || sz == 0) return bySize[sz];
    std::vector<Term> out;
    for (const FunSymbol& f : sigmaD) {
      if (f.arity() == 0) {
        if (sz == 1) out.push_back(Term::apply(f));
        continue;
      }
      if (sz < f.arity() + 1) continue;
      // distribute sz-1 nodes over the arguments
      std::function<void(std::size_t, std::size_t, std::vector<Term>&)> fill =
          [&](std::size_t argIdx, std::size_t budget, std::vector<Term>& acc) {
            if (argIdx == f.arity()) {
              if (budget == 0) out.push_back(Term::apply(f, acc));
              return;
            }
            std::size_t remainingArgs = f.arity() - argIdx - 1;
            for (std::size_t k = 1; k + remainingArgs <= budget; ++k) {
              for (const Term& sub : bySize[k]) {
                acc.push_back(sub);
                fill(argIdx + 1, budget - k, acc);
                acc.pop_back();
              }
            }
          };
      std::vector<Term> acc;
      fill(0, sz - 1, acc);
    }
    bySize[sz] = std::move(out);
    return bySize[sz];
  };

  bool anyConstant = false;
  for (const FunSymbol& f : sigmaD)
    if (f.arity() == 0) anyConstant = true;
  if (sigmaD.empty() || !anyConstant) {
    // no ground data terms at all
    return uni;
  }

  for (std::size_t sz = 1;; ++sz) {
    const std::vector<Term>& layer = termsOfSize(sz);
    bool layerAdded = false;
    bool layerHadTerms = !layer.empty();
    for (const Term& t : layer) {
      Term nf = normalizeData(rdTrs, t);
      if (addNormalForm(nf)) layerAdded = true;
    }
    if (sz == 1 && !layerHadTerms) return uni;
    if (sz > 1 && !layerAdded) {
      // closure check: every constructor over known normal forms renormalizes
      // into the set
      bool closed = true;
      for (const FunSymbol& f : sigmaD) {
        std::vector<std::size_t> idx(f.arity(), 0);
        std::vector<Term> knownVec(known.begin(), known.end());
        if (f.arity() > 0 && knownVec.empty()) continue;
        bool done = false;
        while (!done && closed) {
          std::vector<Term> args;
          for (std::size_t k = 0; k < f.arity(); ++k) args.push_back(knownVec[idx[k]]);
          Term nf = normalizeData(rdTrs, Term::apply(f, args));
          if (!known.count(nf)) closed = false;
          // advance the tuple
          done = true;
          for (std::size_t k = 0; k < f.arity(); ++k) {
            if (++idx[k] < knownVec.size()) {
              done = false;
              break;
            }
            idx[k] = 0;
          }
          if (f.arity() == 0) done = true;
        }
        if (!closed) break;
      }
      if (closed) break;
    }
    if (sz > cap + 2 && known.empty())
      throw Error(ErrorCode::UniverseOverflow, "no data normal forms found by size " +
                                                   std::to_string(sz));
  }

  uni.elements.assign(known.begin(), known.end());
  std::sort(uni.elements.begin(), uni.elements.end());  // size-then-lexicographic
  return uni;
}

// ---------------------------------------------------------------------------
// Validation

std::size_t ValidationReport::errorCount() const {
  std::size_t n = 0;
  for (const Finding& f : findings)
    if (f.severity == Severity::ErrorFinding) ++n;
  return n;
}

std::string ValidationReport::str() const {
  std::ostringstream os;
  switch (verdict) {
    case SpecVerdict::Proper: os << "verdict: proper\n"; break;
    case SpecVerdict::Improper: os << "verdict: improper\n"; break;
    case SpecVerdict::IllFormed: os << "verdict: ill-formed\n"; break;
  }
  for (const Finding& f : findings) {
    os << (f.severity == Severity::ErrorFinding ? "error" : "warning") << " @ " << f.where << ": "
       << f.message << "\n";
  }
  if (universe) {
    os << "data universe:";
    for (const Term& t : universe->elements) os << " " << t.str();
    os << "\n";
  }
  return os.str();
}

ValidationReport validate(const StreamSpec& spec, std::size_t universeCap) {
  ValidationReport rep;
  bool structural = false;

  auto err = [&](std::string where, std::string msg) {
    rep.findings.push_back({Severity::ErrorFinding, std::move(where), std::move(msg)});
  };
  auto warn = [&](std::string where, std::string msg) {
    rep.findings.push_back({Severity::Warning, std::move(where), std::move(msg)});
  };

  // (a) structural classification
  for (const FunSymbol& f : spec.sigmaD) {
    bool bad = f.resultSort != Sort::Data;
    for (Sort s : f.argSorts)
      if (s != Sort::Data) bad = true;
    if (bad) {
      err(f.name, "data symbols must have all-data arguments and data result");
      structural = true;
    }
  }
  for (const FunSymbol& f : spec.sigmaS) {
    if (f.resultSort != Sort::Stream) {
      err(f.name, "stream symbols must have stream result");
      structural = true;
    }
    bool seenStream = false;
    for (Sort s : f.argSorts) {
      if (s == Sort::Stream) seenStream = true;
      else if (seenStream) {
        err(f.name, "data arguments must precede stream arguments");
        structural = true;
      }
    }
  }
  for (std::size_t i = 0; i < spec.rd.size(); ++i) {
    if (spec.rd[i].lhs.sort() != Sort::Data) {
      err(spec.ruleName(true, i), "data rule must be of data sort");
      structural = true;
    }
  }
  for (std::size_t i = 0; i < spec.rs.size(); ++i) {
    if (spec.rs[i].lhs.sort() != Sort::Stream) {
      err(spec.ruleName(false, i), "stream rule must be of stream sort");
      structural = true;
    }
  }

  // (b) orthogonality of R_s u R_d as one system
  std::vector<Rule> all = spec.rs;
  std::vector<std::string> names;
  for (std::size_t i = 0; i < spec.rs.size(); ++i) names.push_back(spec.ruleName(false, i));
  for (std::size_t i = 0; i < spec.rd.size(); ++i) {
    all.push_back(spec.rd[i]);
    names.push_back(spec.ruleName(true, i));
  }
  for (const std::string& v : orthogonalityViolations(all, names)) err("orthogonality", v);

  // (c) left-hand side shape of stream rules
  for (std::size_t i = 0; i < spec.rs.size(); ++i) {
    const Rule& r = spec.rs[i];
    const std::string where = spec.ruleName(false, i);
    if (r.lhs.isVariable()) continue;  // cannot happen; Rule forbids it
    const FunSymbol& root = r.lhs.symbol();
    if (!spec.findStream(root.name)) {
      err(where, "left-hand side must be rooted by a declared stream symbol, found '" +
                     root.name + "'");
      continue;
    }
    for (std::size_t k = 0; k < r.lhs.args().size(); ++k) {
      const Term& arg = r.lhs.args()[k];
      if (root.argSorts[k] == Sort::Data) continue;
      if (arg.isVariable()) continue;
      bool consPattern = !arg.isVariable() && arg.symbol() == consSymbol() &&
                         arg.args()[0].isVariable() && arg.args()[1].isVariable();
      if (!consPattern)
        err(where, "stream argument " + std::to_string(k + 1) + " is '" + arg.str() +
                       "'; it must be a variable or x : sigma with fresh variables");
    }
  }

  // D is needed for (d) and (e)
  std::optional<DataUniverse> uni;
  try {
    uni = dataUniverse(spec.sigmaD, spec.rd, universeCap);
  } catch (const Error& e) {
    err("data universe", e.what());
  }
  rep.universe = uni;

  if (uni) {
    // (d) exhaustiveness: every f(d1..dn, d:t ...) over D matches some lhs
    const std::vector<Term>& D = uni->elements;
    for (const FunSymbol& f : spec.sigmaS) {
      std::size_t nData = 0, nStream = 0;
      for (Sort s : f.argSorts) (s == Sort::Data ? nData : nStream)++;
      std::size_t slots = nData + nStream;
      if (!D.empty() || slots == 0) {
        std::vector<std::size_t> idx(slots, 0);
        bool done = false;
        std::size_t missing = 0;
        std::string example;
        while (!done) {
          std::vector<Term> args;
          std::size_t slot = 0;
          for (std::size_t k = 0; k < f.argSorts.size(); ++k) {
            if (f.argSorts[k] == Sort::Data) {
              args.push_back(D[idx[slot++]]);
            } else {
              Term fresh = Term::variable("@s" + std::to_string(k + 1), Sort::Stream);
              args.push_back(Term::cons(D[idx[slot++]], fresh));
            }
          }
          Term subject = Term::apply(f, args);
          bool matched = false;
          for (const Rule& r : spec.rs)
            if (match(r.lhs, subject)) {
              matched = true;
              break;
            }
          if (!matched) {
            if (missing == 0) example = subject.str();
            ++missing;
          }
          done = true;
          for (std::size_t k = 0; k < slots; ++k) {
            if (++idx[k] < D.size()) {
              done = false;
              break;
            }
            idx[k] = 0;
          }
          if (slots == 0) done = true;
        }
        if (missing > 0)
          err(f.name, "not exhaustive: " + std::to_string(missing) +
                          " instantiation(s) over D match no rule, e.g. " + example);
      }
    }

    // (e) stuck data terms
    std::set<std::string> definedData;
    for (const Rule& r : spec.rd) definedData.insert(r.lhs.symbol().name);
    for (const Term& el : D) {
      bool stuck = false;
      for (const std::string& d : definedData)
        if (el.containsSymbol(d)) stuck = true;
      if (stuck)
        warn(el.str(), "element of D contains a defined data symbol (stuck data term; "
                       "R_d is probably incomplete)");
    }
  }

  if (rep.errorCount() == 0)
    rep.verdict = SpecVerdict::Proper;
  else
    rep.verdict = structural ? SpecVerdict::IllFormed : SpecVerdict::Improper;
  return rep;
}

bool isDataIndependent(const StreamSpec& spec) {
  std::function<bool(const Term&)> ok = [&](const Term& t) -> bool {
    if (t.isVariable()) return true;
    if (t.sort() == Sort::Data) return false;  // a non-variable data subterm
    for (const Term& a : t.args())
      if (!ok(a)) return false;
    return true;
  };
  for (const Rule& r : spec.rs)
    if (!ok(r.lhs)) return false;
  return true;
}

}  // namespace streamwd
