#include "streamwd/export.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>

namespace streamwd {

namespace {

bool tpdbReserved(const std::string& name) {
  return name == "VAR" || name == "RULES" || name == "cons" || name == "THEORY" ||
         name == "STRATEGY" || name == "COMMENT";
}

std::string tpdbName(const FunSymbol& sym) {
  if (sym == consSymbol()) return "cons";
  std::string name = sym.name;
  if (tpdbReserved(name)) name += "_";
  return name;
}

void printTpdbTerm(std::ostringstream& os, const Term& t) {
  if (t.isVariable()) {
    os << t.varName();
    return;
  }
  os << tpdbName(t.symbol());
  if (!t.args().empty()) {
    os << "(";
    for (std::size_t i = 0; i < t.args().size(); ++i) {
      if (i) os << ", ";
      printTpdbTerm(os, t.args()[i]);
    }
    os << ")";
  }
}

}  // namespace

std::string toTpdb(const Trs& trs) {
  std::set<std::string> vars;
  std::function<void(const Term&)> collect = [&](const Term& t) {
    if (t.isVariable()) {
      vars.insert(t.varName());
      return;
    }
    for (const Term& a : t.args()) collect(a);
  };
  for (const Rule& r : trs.rules) {
    collect(r.lhs);
    collect(r.rhs);
  }

  std::ostringstream os;
  os << "(VAR";
  if (vars.empty()) {
    os << " ";
  } else {
    for (const std::string& v : vars) os << " " << v;
  }
  os << ")\n(RULES \n";
  for (const Rule& r : trs.rules) {
    os << "  ";
    printTpdbTerm(os, r.lhs);
    os << " -> ";
    printTpdbTerm(os, r.rhs);
    os << "\n";
  }
  os << ")";
  return os.str();
}

// ---------------------------------------------------------------------------

namespace {

std::string fmt(double v) {
  char buf[64];
  // normalize -0
  if (v == 0.0) v = 0.0;
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

}  // namespace

std::string turtleSvg(const std::vector<int>& bits, const TurtleConfig& cfg) {
  constexpr double kPi = 3.14159265358979323846;
  double heading = cfg.startHeading;
  double x = 0.0, y = 0.0;
  std::vector<std::pair<double, double>> points{{x, y}};
  points.reserve(bits.size() + 1);
  for (int b : bits) {
    heading += (b == 0 ? cfg.angle0 : cfg.angle1);
    double rad = heading * kPi / 180.0;
    x += cfg.unit * std::cos(rad);
    y -= cfg.unit * std::sin(rad);  // positive angle turns left on screen
    points.emplace_back(x, y);
  }

  double minX = points[0].first, maxX = points[0].first;
  double minY = points[0].second, maxY = points[0].second;
  for (const auto& [px, py] : points) {
    minX = std::min(minX, px);
    maxX = std::max(maxX, px);
    minY = std::min(minY, py);
    maxY = std::max(maxY, py);
  }
  double w = maxX - minX, h = maxY - minY;
  if (w <= 0) w = cfg.unit;
  if (h <= 0) h = cfg.unit;
  double margin = 0.05 * std::max(w, h);

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << fmt(minX - margin) << " "
     << fmt(minY - margin) << " " << fmt(w + 2 * margin) << " " << fmt(h + 2 * margin)
     << "\">\n";
  os << "<path fill=\"none\" stroke=\"black\" stroke-width=\"" << fmt(cfg.unit * 0.1)
     << "\" d=\"";
  os << "M " << fmt(points[0].first) << " " << fmt(points[0].second);
  for (std::size_t i = 1; i < points.size(); ++i)
    os << " L " << fmt(points[i].first) << " " << fmt(points[i].second);
  os << "\"/>\n</svg>\n";
  return os.str();
}

std::vector<int> bitsFromValues(const StreamSpec& spec, const DataUniverse& universe,
                                const std::vector<Term>& values) {
  if (universe.elements.size() != 2)
    throw Error(ErrorCode::NonBooleanData,
                "turtle rendering needs a two-element data universe, found " +
                    std::to_string(universe.elements.size()));
  // declaration order of the constructors in the sig block decides 0/1
  std::vector<Term> order;
  for (const FunSymbol& s : spec.sigmaD) {
    if (s.arity() != 0) continue;
    Term t = Term::apply(s);
    if (universe.containsTerm(t)) order.push_back(t);
  }
  for (const Term& el : universe.elements)
    if (std::find(order.begin(), order.end(), el) == order.end()) order.push_back(el);

  std::vector<int> bits;
  bits.reserve(values.size());
  for (const Term& v : values) {
    if (v == order[0])
      bits.push_back(0);
    else if (v == order[1])
      bits.push_back(1);
    else
      throw Error(ErrorCode::NonBooleanData, "value " + v.str() + " is not in D");
  }
  return bits;
}

}  // namespace streamwd
