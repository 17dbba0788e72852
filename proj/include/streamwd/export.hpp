#pragma once

// File exporters: the classic termination-competition TRS text format and
// SVG turtle renderings of boolean stream prefixes.

#include <string>
#include <vector>

#include "streamwd/spec.hpp"
#include "streamwd/term.hpp"

namespace streamwd {

// Deterministic text: a (VAR ...) block listing all variables sorted by
// name, then (RULES ...) in rule order, one rule per line with two-space
// indent and `->`. ':' prints as `cons`; a user symbol already named `cons`
// (or another reserved word) is suffixed with '_'.
std::string toTpdb(const Trs& trs);

struct TurtleConfig {
  double angle0 = -120.0;    // degrees applied on reading the first D element
  double angle1 = 30.0;      // degrees on reading the second; positive = left
  double unit = 10.0;        // segment length
  double startHeading = 0.0; // degrees, 0 = towards positive x
};

// Turn-then-draw per element: the heading changes by angle0/angle1, then one
// unit-length segment is drawn. The viewport is auto-fitted with a 5% margin.
// `bits` must contain only 0 and 1 (the mapping from a two-element D follows
// the sig-block declaration order; see bitsFromValues).
std::string turtleSvg(const std::vector<int>& bits, const TurtleConfig& cfg);

// Maps prefix values over a two-element data universe to 0/1 by declaration
// order of the data constructors; throws Error(NonBooleanData) otherwise.
std::vector<int> bitsFromValues(const StreamSpec& spec, const DataUniverse& universe,
                                const std::vector<Term>& values);

}  // namespace streamwd
