#include "streamwd/termination.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <set>
#include <sstream>

namespace streamwd {

const char* to_string(UnknownReason r) {
  switch (r) {
    case UnknownReason::SearchExhausted: return "search-exhausted";
    case UnknownReason::TimeBudget: return "time-budget";
    case UnknownReason::GraphTooLarge: return "graph-too-large";
  }
  return "?";
}

namespace {

std::set<std::string> definedSymbols(const Trs& trs) {
  std::set<std::string> out;
  for (const Rule& r : trs.rules) out.insert(r.lhs.symbol().name);
  return out;
}

FunSymbol marked(const FunSymbol& f) {
  FunSymbol m = f;
  m.name += "#";
  return m;
}

Term markRoot(const Term& t) {
  return Term::apply(marked(t.symbol()), t.args());
}

}  // namespace

std::vector<DependencyPair> dependencyPairs(const Trs& trs) {
  std::set<std::string> defined = definedSymbols(trs);
  std::vector<DependencyPair> pairs;
  for (std::size_t r = 0; r < trs.rules.size(); ++r) {
    const Rule& rule = trs.rules[r];
    Term lhs = markRoot(rule.lhs);
    std::function<void(const Term&)> scan = [&](const Term& t) {
      if (t.isVariable()) return;
      if (defined.count(t.symbol().name)) {
        DependencyPair p{lhs, markRoot(t), r};
        if (std::find(pairs.begin(), pairs.end(), p) == pairs.end()) pairs.push_back(p);
      }
      for (const Term& a : t.args()) scan(a);
    };
    scan(rule.rhs);
  }
  return pairs;
}

namespace {

Term capTerm(const Term& t, const std::set<std::string>& defined, int& counter) {
  if (t.isVariable()) return t;
  std::vector<Term> args;
  args.reserve(t.args().size());
  for (const Term& a : t.args()) {
    if (!a.isVariable() && defined.count(a.symbol().name)) {
      args.push_back(Term::variable("@cap" + std::to_string(++counter), a.sort()));
    } else {
      args.push_back(capTerm(a, defined, counter));
    }
  }
  return Term::apply(t.symbol(), std::move(args));
}

Term renameApart(const Term& t, const std::string& suffix) {
  Substitution theta;
  for (const Var& v : t.vars()) theta.bind(v, Term::variable(v.name + suffix, v.sort));
  return theta.apply(t);
}

}  // namespace

std::vector<std::vector<std::size_t>> estimatedGraph(const Trs& trs,
                                                     const std::vector<DependencyPair>& pairs) {
  std::set<std::string> defined = definedSymbols(trs);
  std::vector<std::vector<std::size_t>> adj(pairs.size());
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    int counter = 0;
    Term capped = capTerm(pairs[p].rhs, defined, counter);
    for (std::size_t q = 0; q < pairs.size(); ++q) {
      Term target = renameApart(pairs[q].lhs, "@r");
      if (unify(capped, target)) adj[p].push_back(q);
    }
  }
  return adj;
}

// ---------------------------------------------------------------------------
// SCC decomposition (iterative Tarjan over a subset of nodes)

namespace {

std::vector<std::vector<std::size_t>> sccsOf(const std::vector<std::vector<std::size_t>>& adj,
                                             const std::vector<std::size_t>& nodes) {
  std::set<std::size_t> alive(nodes.begin(), nodes.end());
  std::map<std::size_t, int> index, low;
  std::vector<std::size_t> stack;
  std::set<std::size_t> onStack;
  std::vector<std::vector<std::size_t>> sccs;
  int counter = 0;

  std::function<void(std::size_t)> strongconnect = [&](std::size_t v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    onStack.insert(v);
    for (std::size_t w : adj[v]) {
      if (!alive.count(w)) continue;
      if (!index.count(w)) {
        strongconnect(w);
        low[v] = std::min(low[v], low[w]);
      } else if (onStack.count(w)) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      std::vector<std::size_t> scc;
      while (true) {
        std::size_t w = stack.back();
        stack.pop_back();
        onStack.erase(w);
        scc.push_back(w);
        if (w == v) break;
      }
      std::sort(scc.begin(), scc.end());
      // keep only components that contain a cycle
      bool cyclic = scc.size() > 1;
      if (!cyclic) {
        std::size_t n = scc[0];
        for (std::size_t w : adj[n])
          if (w == n) cyclic = true;
      }
      if (cyclic) sccs.push_back(std::move(scc));
    }
  };

  for (std::size_t v : nodes)
    if (!index.count(v)) strongconnect(v);
  std::sort(sccs.begin(), sccs.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return sccs;
}

// ---------------------------------------------------------------------------
// Usable rules: the syntactic symbol-transitive closure

std::vector<std::size_t> usableRulesFor(const Trs& trs, const std::vector<DependencyPair>& pairs,
                                        const std::vector<std::size_t>& scc) {
  std::set<std::string> defined = definedSymbols(trs);
  std::set<std::string> wanted;
  std::function<void(const Term&)> collect = [&](const Term& t) {
    if (t.isVariable()) return;
    if (defined.count(t.symbol().name)) wanted.insert(t.symbol().name);
    for (const Term& a : t.args()) collect(a);
  };
  for (std::size_t p : scc)
    for (const Term& a : pairs[p].rhs.args()) collect(a);

  bool grew = true;
  std::set<std::size_t> usable;
  while (grew) {
    grew = false;
    for (std::size_t r = 0; r < trs.rules.size(); ++r) {
      if (usable.count(r)) continue;
      if (!wanted.count(trs.rules[r].lhs.symbol().name)) continue;
      usable.insert(r);
      grew = true;
      std::size_t before = wanted.size();
      collect(trs.rules[r].rhs);
      if (wanted.size() != before) grew = true;
    }
  }
  return {usable.begin(), usable.end()};
}

// ---------------------------------------------------------------------------
// Linear forms and constraint evaluation

struct LinearForm {
  std::int64_t constant = 0;
  std::map<Var, std::int64_t> coeffs;
};

using Assignment = std::map<std::string, std::vector<std::int64_t>>;

LinearForm interpret(const Term& t, const Assignment& a) {
  if (t.isVariable()) {
    LinearForm f;
    f.coeffs[t.var()] = 1;
    return f;
  }
  auto it = a.find(t.symbol().name);
  const std::vector<std::int64_t>& c = it->second;
  LinearForm out;
  out.constant = c[0];
  for (std::size_t i = 0; i < t.args().size(); ++i) {
    if (c[i + 1] == 0) continue;
    LinearForm sub = interpret(t.args()[i], a);
    out.constant += c[i + 1] * sub.constant;
    for (const auto& [v, k] : sub.coeffs) out.coeffs[v] += c[i + 1] * k;
  }
  return out;
}

// lhs >= rhs for all naturals, by coefficient-wise dominance
bool weaklyGreater(const LinearForm& l, const LinearForm& r) {
  if (l.constant < r.constant) return false;
  for (const auto& [v, k] : r.coeffs) {
    auto it = l.coeffs.find(v);
    std::int64_t lk = it == l.coeffs.end() ? 0 : it->second;
    if (lk < k) return false;
  }
  return true;
}

bool strictlyGreater(const LinearForm& l, const LinearForm& r) {
  return weaklyGreater(l, r) && l.constant > r.constant;
}

struct TimeBudgetExceeded {};

struct SccSearch {
  const Trs& trs;
  const std::vector<DependencyPair>& pairs;
  const std::vector<std::size_t>& scc;
  const std::vector<std::size_t>& usable;
  std::int64_t coeffMax;
  std::chrono::steady_clock::time_point deadline;

  struct Constraint {
    const Term* lhs;
    const Term* rhs;
    bool isPair = false;
    std::size_t pairIndex = 0;       // global pair index when isPair
    std::size_t lastSymbol = 0;      // index into `symbols` of the latest symbol used
  };

  std::vector<std::string> symbols;          // sorted by name
  std::vector<std::size_t> arity;            // parallel
  std::vector<Constraint> constraints;
  Assignment assignment;
  std::size_t nodesVisited = 0;

  bool collectSymbols() {
    std::set<std::string> names;
    std::map<std::string, std::size_t> arities;
    std::function<void(const Term&)> collect = [&](const Term& t) {
      if (t.isVariable()) return;
      names.insert(t.symbol().name);
      arities[t.symbol().name] = t.symbol().arity();
      for (const Term& a : t.args()) collect(a);
    };
    for (std::size_t r : usable) {
      collect(trs.rules[r].lhs);
      collect(trs.rules[r].rhs);
    }
    for (std::size_t p : scc) {
      collect(pairs[p].lhs);
      collect(pairs[p].rhs);
    }
    symbols.assign(names.begin(), names.end());
    for (const std::string& n : symbols) arity.push_back(arities[n]);
    return true;
  }

  std::size_t lastSymbolIndex(const Term& a, const Term& b) {
    std::size_t last = 0;
    std::function<void(const Term&)> scan = [&](const Term& t) {
      if (t.isVariable()) return;
      auto it = std::find(symbols.begin(), symbols.end(), t.symbol().name);
      last = std::max(last, static_cast<std::size_t>(it - symbols.begin()));
      for (const Term& s : t.args()) scan(s);
    };
    scan(a);
    scan(b);
    return last;
  }

  void buildConstraints() {
    for (std::size_t r : usable) {
      Constraint c{&trs.rules[r].lhs, &trs.rules[r].rhs, false, 0, 0};
      c.lastSymbol = lastSymbolIndex(trs.rules[r].lhs, trs.rules[r].rhs);
      constraints.push_back(c);
    }
    for (std::size_t p : scc) {
      Constraint c{&pairs[p].lhs, &pairs[p].rhs, true, p, 0};
      c.lastSymbol = lastSymbolIndex(pairs[p].lhs, pairs[p].rhs);
      constraints.push_back(c);
    }
  }

  bool checkLevel(std::size_t level) {
    for (const Constraint& c : constraints) {
      if (c.lastSymbol != level) continue;
      if (!weaklyGreater(interpret(*c.lhs, assignment), interpret(*c.rhs, assignment)))
        return false;
    }
    return true;
  }

  std::optional<LinearInterpretation> found;

  bool search(std::size_t level) {
    if ((++nodesVisited & 4095) == 0 && std::chrono::steady_clock::now() > deadline)
      throw TimeBudgetExceeded{};
    if (level == symbols.size()) {
      // all weak constraints hold; require at least one strict pair
      for (std::size_t p : scc) {
        if (strictlyGreater(interpret(pairs[p].lhs, assignment),
                            interpret(pairs[p].rhs, assignment))) {
          LinearInterpretation li;
          li.coeffs = assignment;
          found = li;
          return true;
        }
      }
      return false;
    }
    std::size_t k = arity[level] + 1;
    std::vector<std::int64_t> vec(k, 0);
    assignment[symbols[level]] = vec;
    while (true) {
      assignment[symbols[level]] = vec;
      if (checkLevel(level) && search(level + 1)) return true;
      // next vector in lexicographic order (last coordinate fastest)
      std::size_t i = k;
      while (i > 0) {
        if (++vec[i - 1] <= coeffMax) break;
        vec[i - 1] = 0;
        --i;
      }
      if (i == 0) break;
    }
    assignment.erase(symbols[level]);
    return false;
  }
};

}  // namespace

std::string TerminationCertificate::str() const {
  std::ostringstream os;
  os << "certificate\n";
  for (const CertificateStep& s : steps) {
    os << "step\n  pairs";
    for (std::size_t p : s.sccPairs) os << " " << p;
    os << "\n  usable";
    for (std::size_t r : s.usableRules) os << " " << r;
    os << "\n";
    for (const auto& [name, coeffs] : s.interpretation.coeffs) {
      os << "  interp " << name;
      for (std::int64_t c : coeffs) os << " " << c;
      os << " ;\n";
    }
    os << "  strict";
    for (std::size_t p : s.strictPairs) os << " " << p;
    os << "\nend\n";
  }
  return os.str();
}

ProveResult proveTermination(const Trs& trs, const ProverConfig& config) {
  auto deadline = std::chrono::steady_clock::now() +
                  std::chrono::microseconds(static_cast<long long>(config.timeBudgetSeconds * 1e6));
  std::vector<DependencyPair> pairs = dependencyPairs(trs);
  if (pairs.size() > config.maxPairs)
    return Unknown{UnknownReason::GraphTooLarge,
                   std::to_string(pairs.size()) + " dependency pairs exceed the limit of " +
                       std::to_string(config.maxPairs)};
  auto graph = estimatedGraph(trs, pairs);

  std::vector<std::size_t> all(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) all[i] = i;

  std::vector<std::vector<std::size_t>> worklist = sccsOf(graph, all);
  TerminationCertificate cert;

  while (!worklist.empty()) {
    std::vector<std::size_t> scc = worklist.front();
    worklist.erase(worklist.begin());
    std::vector<std::size_t> usable = usableRulesFor(trs, pairs, scc);

    SccSearch search{trs, pairs, scc, usable, config.coeffMax, deadline};
    search.collectSymbols();
    search.buildConstraints();
    bool ok;
    try {
      ok = search.search(0);
    } catch (TimeBudgetExceeded) {
      return Unknown{UnknownReason::TimeBudget,
                     "time budget exceeded while searching an interpretation for an SCC of " +
                         std::to_string(scc.size()) + " pair(s)"};
    }
    if (!ok)
      return Unknown{UnknownReason::SearchExhausted,
                     "no linear interpretation with coefficients 0.." +
                         std::to_string(config.coeffMax) + " for an SCC of " +
                         std::to_string(scc.size()) + " pair(s)"};

    CertificateStep step;
    step.sccPairs = scc;
    step.usableRules = usable;
    step.interpretation = *search.found;
    std::vector<std::size_t> residual;
    for (std::size_t p : scc) {
      if (strictlyGreater(interpret(pairs[p].lhs, search.assignment),
                          interpret(pairs[p].rhs, search.assignment)))
        step.strictPairs.push_back(p);
      else
        residual.push_back(p);
    }
    cert.steps.push_back(step);

    auto sub = sccsOf(graph, residual);
    worklist.insert(worklist.begin(), sub.begin(), sub.end());
  }
  return Proved{std::move(cert)};
}

}  // namespace streamwd
