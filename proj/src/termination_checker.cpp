// Independent certificate verification. This file deliberately re-derives
// dependency pairs, the estimated graph, usable rules and the polynomial
// comparisons from scratch, sharing only term-core with the prover.

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "streamwd/termination.hpp"

namespace streamwd {

namespace {

struct CheckerPair {
  Term lhs;
  Term rhs;
};

std::set<std::string> rootsOfLhss(const Trs& trs) {
  std::set<std::string> out;
  for (const Rule& r : trs.rules) out.insert(r.lhs.symbol().name);
  return out;
}

Term withMarkedRoot(const Term& t) {
  FunSymbol m = t.symbol();
  m.name += "#";
  return Term::apply(m, t.args());
}

std::vector<CheckerPair> recomputePairs(const Trs& trs) {
  std::set<std::string> defined = rootsOfLhss(trs);
  std::vector<CheckerPair> out;
  for (const Rule& rule : trs.rules) {
    // worklist traversal of the right-hand side, pre-order
    std::vector<Term> stack{rule.rhs};
    std::vector<Term> inOrder;
    while (!stack.empty()) {
      Term t = stack.front();
      stack.erase(stack.begin());
      inOrder.push_back(t);
      if (!t.isVariable()) {
        std::vector<Term> front(t.args().begin(), t.args().end());
        stack.insert(stack.begin(), front.begin(), front.end());
      }
    }
    for (const Term& t : inOrder) {
      if (t.isVariable() || !defined.count(t.symbol().name)) continue;
      CheckerPair p{withMarkedRoot(rule.lhs), withMarkedRoot(t)};
      bool dup = false;
      for (const CheckerPair& q : out)
        if (q.lhs == p.lhs && q.rhs == p.rhs) dup = true;
      if (!dup) out.push_back(p);
    }
  }
  return out;
}

Term capBelow(const Term& t, const std::set<std::string>& defined, int& n) {
  if (t.isVariable()) return t;
  std::vector<Term> args;
  for (const Term& a : t.args()) {
    if (!a.isVariable() && defined.count(a.symbol().name))
      args.push_back(Term::variable("%c" + std::to_string(++n), a.sort()));
    else
      args.push_back(capBelow(a, defined, n));
  }
  return Term::apply(t.symbol(), args);
}

bool graphEdge(const CheckerPair& p, const CheckerPair& q, const std::set<std::string>& defined) {
  int n = 0;
  Term capped = capBelow(p.rhs, defined, n);
  Substitution rename;
  for (const Var& v : q.lhs.vars()) rename.bind(v, Term::variable(v.name + "%q", v.sort));
  return unify(capped, rename.apply(q.lhs)).has_value();
}

// polynomial = constant + sum coeff_i * var_i, over naturals
struct Poly {
  long long c0 = 0;
  std::map<Var, long long> lin;
};

bool evalPoly(const Term& t, const LinearInterpretation& li, Poly& out) {
  if (t.isVariable()) {
    out = Poly{};
    out.lin[t.var()] = 1;
    return true;
  }
  auto it = li.coeffs.find(t.symbol().name);
  if (it == li.coeffs.end()) return false;
  if (it->second.size() != t.args().size() + 1) return false;
  Poly acc;
  acc.c0 = it->second[0];
  if (acc.c0 < 0) return false;
  for (std::size_t i = 0; i < t.args().size(); ++i) {
    long long k = it->second[i + 1];
    if (k < 0) return false;
    if (k == 0) continue;
    Poly sub;
    if (!evalPoly(t.args()[i], li, sub)) return false;
    acc.c0 += k * sub.c0;
    for (const auto& [v, c] : sub.lin) acc.lin[v] += k * c;
  }
  out = acc;
  return true;
}

bool polyGeq(const Poly& a, const Poly& b) {
  if (a.c0 < b.c0) return false;
  for (const auto& [v, c] : b.lin) {
    auto it = a.lin.find(v);
    if ((it == a.lin.end() ? 0 : it->second) < c) return false;
  }
  return true;
}

bool polyGt(const Poly& a, const Poly& b) { return polyGeq(a, b) && a.c0 > b.c0; }

// strongly connected components (Kosaraju, distinct from the prover's Tarjan)
std::vector<std::set<std::size_t>> kosarajuSccs(const std::vector<std::vector<bool>>& edge,
                                                const std::set<std::size_t>& alive) {
  std::vector<std::size_t> order;
  std::set<std::size_t> seen;
  std::function<void(std::size_t)> dfs1 = [&](std::size_t v) {
    seen.insert(v);
    for (std::size_t w : alive)
      if (edge[v][w] && !seen.count(w)) dfs1(w);
    order.push_back(v);
  };
  for (std::size_t v : alive)
    if (!seen.count(v)) dfs1(v);

  std::set<std::size_t> assigned;
  std::vector<std::set<std::size_t>> comps;
  std::function<void(std::size_t, std::set<std::size_t>&)> dfs2 = [&](std::size_t v,
                                                                      std::set<std::size_t>& comp) {
    assigned.insert(v);
    comp.insert(v);
    for (std::size_t w : alive)
      if (edge[w][v] && !assigned.count(w)) dfs2(w, comp);
  };
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if (assigned.count(*it)) continue;
    std::set<std::size_t> comp;
    dfs2(*it, comp);
    bool cyclic = comp.size() > 1 || edge[*it][*it];
    if (cyclic) comps.push_back(std::move(comp));
  }
  return comps;
}

std::set<std::size_t> checkerUsable(const Trs& trs, const std::vector<CheckerPair>& pairs,
                                    const std::set<std::size_t>& scc) {
  std::set<std::string> defined = rootsOfLhss(trs);
  std::set<std::string> reach;
  std::function<void(const Term&)> grab = [&](const Term& t) {
    if (t.isVariable()) return;
    if (defined.count(t.symbol().name)) reach.insert(t.symbol().name);
    for (const Term& a : t.args()) grab(a);
  };
  for (std::size_t p : scc)
    for (const Term& a : pairs[p].rhs.args()) grab(a);
  std::set<std::size_t> usable;
  for (bool grew = true; grew;) {
    grew = false;
    for (std::size_t r = 0; r < trs.rules.size(); ++r) {
      if (usable.count(r) || !reach.count(trs.rules[r].lhs.symbol().name)) continue;
      usable.insert(r);
      grab(trs.rules[r].rhs);
      grew = true;
    }
  }
  return usable;
}

}  // namespace

CheckResult checkCertificate(const Trs& trs, const TerminationCertificate& cert) {
  std::vector<CheckerPair> pairs = recomputePairs(trs);
  std::set<std::string> defined = rootsOfLhss(trs);

  std::vector<std::vector<bool>> edge(pairs.size(), std::vector<bool>(pairs.size(), false));
  for (std::size_t p = 0; p < pairs.size(); ++p)
    for (std::size_t q = 0; q < pairs.size(); ++q) edge[p][q] = graphEdge(pairs[p], pairs[q], defined);

  std::set<std::size_t> residual;
  for (std::size_t i = 0; i < pairs.size(); ++i) residual.insert(i);

  for (std::size_t s = 0; s < cert.steps.size(); ++s) {
    const CertificateStep& step = cert.steps[s];
    std::set<std::size_t> claimed(step.sccPairs.begin(), step.sccPairs.end());

    for (std::size_t p : claimed) {
      if (p >= pairs.size())
        return CheckInvalid{s, "pair index " + std::to_string(p) + " out of range"};
      if (!residual.count(p))
        return CheckInvalid{s, "pair " + std::to_string(p) + " was already removed"};
    }

    // the claimed set must be an SCC of the current residual graph
    auto comps = kosarajuSccs(edge, residual);
    bool isScc = false;
    for (const auto& comp : comps)
      if (comp == claimed) isScc = true;
    if (!isScc)
      return CheckInvalid{s, "claimed pair set is not a strongly connected component of the "
                             "residual graph"};

    // usable coverage
    std::set<std::size_t> needed = checkerUsable(trs, pairs, claimed);
    std::set<std::size_t> listed(step.usableRules.begin(), step.usableRules.end());
    for (std::size_t r : needed)
      if (!listed.count(r))
        return CheckInvalid{s, "usable rule " + std::to_string(r) + " (" + trs.rules[r].str() +
                                   ") missing from the certificate"};

    // weak decrease of usable rules
    for (std::size_t r : listed) {
      if (r >= trs.rules.size()) return CheckInvalid{s, "rule index out of range"};
      Poly l, rr;
      if (!evalPoly(trs.rules[r].lhs, step.interpretation, l) ||
          !evalPoly(trs.rules[r].rhs, step.interpretation, rr))
        return CheckInvalid{s, "interpretation does not cover rule " + trs.rules[r].str()};
      if (!polyGeq(l, rr))
        return CheckInvalid{s, "usable rule not weakly decreasing: " + trs.rules[r].str()};
    }
    // weak decrease of all SCC pairs
    for (std::size_t p : claimed) {
      Poly l, r;
      if (!evalPoly(pairs[p].lhs, step.interpretation, l) ||
          !evalPoly(pairs[p].rhs, step.interpretation, r))
        return CheckInvalid{s, "interpretation does not cover pair " + std::to_string(p)};
      if (!polyGeq(l, r))
        return CheckInvalid{s, "pair not weakly decreasing: " + pairs[p].lhs.str() + " -> " +
                                   pairs[p].rhs.str()};
    }
    // strict decrease of the removed pairs
    if (step.strictPairs.empty()) return CheckInvalid{s, "step removes no pairs"};
    for (std::size_t p : step.strictPairs) {
      if (!claimed.count(p))
        return CheckInvalid{s, "strict pair " + std::to_string(p) + " is not in the step's SCC"};
      Poly l, r;
      evalPoly(pairs[p].lhs, step.interpretation, l);
      evalPoly(pairs[p].rhs, step.interpretation, r);
      if (!polyGt(l, r))
        return CheckInvalid{s, "claimed strict pair is not strictly decreasing: " +
                                   pairs[p].lhs.str() + " -> " + pairs[p].rhs.str()};
    }
    for (std::size_t p : step.strictPairs) residual.erase(p);
  }

  if (!kosarajuSccs(edge, residual).empty())
    return CheckInvalid{cert.steps.size(), "cycles remain after the final step"};
  return CheckValid{};
}

}  // namespace streamwd
