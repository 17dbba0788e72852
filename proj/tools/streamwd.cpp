// streamwd: a workbench for deciding well-definedness of stream
// specifications by transformation to an observational TRS and termination
// proving, with evaluation, transformation, equivalence-certification and
// turtle-visualization commands.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "streamwd/engine.hpp"
#include "streamwd/equiv.hpp"
#include "streamwd/export.hpp"
#include "streamwd/spec.hpp"
#include "streamwd/syntax.hpp"
#include "streamwd/termination.hpp"
#include "streamwd/transform.hpp"

using namespace streamwd;

namespace {

constexpr int kOk = 0;        // success / well-defined / valid
constexpr int kRefuted = 1;   // improper / invalid / loop found
constexpr int kUnknown = 2;   // inconclusive
constexpr int kUsage = 3;     // usage or parse error

std::size_t defaultFuel() {
  if (const char* env = std::getenv("STREAMWD_FUEL")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
    std::cerr << "warning: ignoring invalid STREAMWD_FUEL value '" << env << "'\n";
  }
  return kDefaultFuel;
}

void writeFileOrStdout(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Usage, "cannot write '" + path + "'");
  out << content;
}

std::string stemOf(const std::string& path) {
  return std::filesystem::path(path).stem().string();
}

std::string trsText(const Trs& trs) {
  std::string out;
  for (const Rule& r : trs.rules) out += r.lhs.str() + " -> " + r.rhs.str() + " ;\n";
  return out;
}

std::string joinValues(const std::vector<Term>& values) {
  bool compact = !values.empty();
  for (const Term& v : values)
    if (v.str().size() != 1) compact = false;
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!compact && i) out += " ";
    out += values[i].str();
  }
  return out;
}

int cmdCheck(const std::string& specPath) {
  StreamSpec spec = parseSpecFile(specPath);
  ValidationReport rep = validate(spec);
  std::cout << rep.str();
  return rep.proper() ? kOk : kRefuted;
}

int cmdObs(const std::string& specPath, const std::string& outPath, bool tpdb) {
  StreamSpec spec = parseSpecFile(specPath);
  ValidationReport rep = validate(spec);
  if (!rep.proper()) {
    std::cerr << rep.str();
    return kRefuted;
  }
  ObsSystem sys = obs(spec);
  Trs combined = sys.withDataRules(spec);
  writeFileOrStdout(outPath, tpdb ? toTpdb(combined) + "\n" : trsText(combined));
  for (const auto& [from, to] : sys.renames)
    std::cerr << "note: user symbol '" << from << "' renamed to '" << to << "'\n";
  return kOk;
}

int cmdUnfold(const std::string& specPath, const std::string& symbol, int position,
              const std::string& outPath) {
  StreamSpec spec = parseSpecFile(specPath);
  StreamSpec result = unfold(spec, symbol, position);
  RenderResult rendered = renderSpec(result);
  for (const std::string& w : rendered.warnings) std::cerr << "warning: " << w << "\n";
  writeFileOrStdout(outPath, rendered.text);
  return kOk;
}

int cmdProve(const std::string& specPath, double timeoutSeconds, std::int64_t coeffMax,
             std::string tpdbOut, std::string certOut, std::size_t fuel) {
  StreamSpec spec = parseSpecFile(specPath);
  std::cout << "spec: " << specPath << "\n";
  ValidationReport rep = validate(spec);
  if (!rep.proper()) {
    std::cout << rep.str();
    std::cout << "verdict: improper\n";
    return kRefuted;
  }
  ObsSystem sys = obs(spec);
  Trs combined = sys.withDataRules(spec);
  std::cout << "observational rules: " << sys.trs.rules.size() << " (+" << spec.rd.size()
            << " data)\n";

  ProverConfig cfg;
  cfg.timeBudgetSeconds = timeoutSeconds;
  cfg.coeffMax = coeffMax;
  ProveResult result = proveTermination(combined, cfg);

  bool dataIndependent = isDataIndependent(spec);
  if (const Proved* proved = std::get_if<Proved>(&result)) {
    CheckResult check = checkCertificate(combined, proved->certificate);
    if (const CheckInvalid* bad = std::get_if<CheckInvalid>(&check)) {
      // A certificate the checker rejects is never reported as a proof.
      std::cout << "verdict: unknown (certificate rejected at step " << bad->step << ": "
                << bad->reason << ")\n";
      return kUnknown;
    }
    if (certOut.empty()) certOut = stemOf(specPath) + ".cert.txt";
    writeFileOrStdout(certOut, proved->certificate.str());
    std::cout << "verdict: well-defined\n";
    std::cout << "certificate: " << certOut << " (" << proved->certificate.steps.size()
              << " step(s), checked: valid)\n";
    if (dataIndependent)
      std::cout << "data-independent: yes; the unique model covers stream functions applied "
                   "to all streams\n";
    else
      std::cout << "data-independent: no; uniqueness holds for the interpretations of ground "
                   "terms\n";
    return kOk;
  }

  const Unknown& unknown = std::get<Unknown>(result);
  std::cout << "verdict: unknown (" << to_string(unknown.reason) << ": " << unknown.detail
            << ")\n";
  if (tpdbOut.empty()) tpdbOut = stemOf(specPath) + ".obs.tpdb";
  writeFileOrStdout(tpdbOut, toTpdb(combined));
  std::cout << "tpdb export for external provers: " << tpdbOut << "\n";

  auto witness = findLoop(combined, standardLoopSeeds(spec, sys));
  if (witness) {
    std::cout << "loop found (the observational variant does not terminate; this does not "
                 "refute well-definedness):\n  "
              << witness->str() << "\n";
  } else {
    std::cout << "loop: none found within the default bounds\n";
  }
  (void)fuel;
  return kUnknown;
}

int cmdEval(const std::string& specPath, const std::string& termText, std::size_t count,
            const std::string& strategy, std::size_t fuel) {
  StreamSpec spec = parseSpecFile(specPath);
  ValidationReport rep = validate(spec);
  if (!rep.proper()) {
    std::cerr << rep.str();
    return kRefuted;
  }
  Term t = parseTerm(spec, termText);
  if (!t.isGround() || t.sort() != Sort::Stream)
    throw Error(ErrorCode::Usage, "-t expects a ground stream term");
  ObsSystem sys = obs(spec);
  PrefixStrategy strat =
      strategy == "obs" ? PrefixStrategy::Obs : PrefixStrategy::Outermost;
  PrefixResult res = prefix(spec, sys, t, count, strat, fuel);
  std::cout << joinValues(res.values) << "\n";
  if (res.failedIndex) {
    std::cerr << "incomplete: element " << *res.failedIndex << " not computed: "
              << res.diagnostic << "\n";
    return kUnknown;
  }
  return kOk;
}

int cmdTurtle(const std::string& specPath, const std::string& termText, std::size_t count,
              const TurtleConfig& cfg, const std::string& strategy, const std::string& outPath,
              std::size_t fuel) {
  StreamSpec spec = parseSpecFile(specPath);
  ValidationReport rep = validate(spec);
  if (!rep.proper()) {
    std::cerr << rep.str();
    return kRefuted;
  }
  Term t = parseTerm(spec, termText);
  if (!t.isGround() || t.sort() != Sort::Stream)
    throw Error(ErrorCode::Usage, "-t expects a ground stream term");
  ObsSystem sys = obs(spec);
  PrefixStrategy strat =
      strategy == "obs" ? PrefixStrategy::Obs : PrefixStrategy::Outermost;
  PrefixResult res = prefix(spec, sys, t, count, strat, fuel);
  if (res.failedIndex) {
    std::cerr << "incomplete: element " << *res.failedIndex << " not computed: "
              << res.diagnostic << "\n";
    return kUnknown;
  }
  std::vector<int> bits = bitsFromValues(spec, *validate(spec).universe, res.values);
  writeFileOrStdout(outPath, turtleSvg(bits, cfg));
  return kOk;
}

int cmdGoals(const std::string& specPath, const std::string& outPath) {
  StreamSpec spec = parseSpecFile(specPath);
  SelfEqualityGoals goals = makeSelfEqualityGoals(spec);
  writeFileOrStdout(outPath, renderGoalsFile(goals));
  return kOk;
}

int cmdCertify(const std::string& specPath, const std::string& proofPath,
               const std::string& againstPath, const std::string& reversePath) {
  StreamSpec specA = parseSpecFile(specPath);
  if (againstPath.empty()) {
    ProofFile file = parseProofFileAt(specA, proofPath);
    ProofResult r = checkProofFile(specA, file);
    std::cout << describe(r) << "\n";
    if (valid(r))
      std::cout << file.lemmas.size() << " lemma(s), " << file.proofs.size()
                << " proof(s) checked\n";
    return valid(r) ? kOk : kRefuted;
  }
  StreamSpec specB = parseSpecFile(againstPath);
  // PROOF holds old-under-new scripts (checked against SPEC2); --reverse
  // holds new-under-old scripts (checked against SPEC).
  ProofFile ab = parseProofFileAt(specB, proofPath);
  ProofFile ba;
  if (!reversePath.empty()) ba = parseProofFileAt(specA, reversePath);
  PreservationVerdict verdict = checkPreservation(specA, specB, ab, ba);
  std::cout << verdict.str();
  return verdict.preserved ? kOk : kRefuted;
}

int cmdSuggest(const std::string& specPath, const std::string& constant, std::size_t count,
               std::size_t fuel) {
  StreamSpec spec = parseSpecFile(specPath);
  AnchorSuggestion s = suggestAnchor(spec, constant, count, fuel);
  std::cout << s.str();
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"streamwd: prove well-definedness of stream specifications by transforming "
               "them to an observational term rewriting system and proving its termination"};
  app.require_subcommand(1);

  std::string specPath, outPath, termText, strategy = "outermost", symbol, constant;
  std::string againstPath, reversePath, proofPath, tpdbOut, certOut;
  std::size_t count = 16;
  int position = 1;
  bool tpdbFlag = false;
  double timeoutSeconds = 10.0;
  std::int64_t coeffMax = 2;
  TurtleConfig turtleCfg;
  std::size_t fuel = defaultFuel();

  auto* check = app.add_subcommand("check", "validate a stream specification");
  check->add_option("spec", specPath, "specification file")->required();

  auto* obsCmd = app.add_subcommand("obs", "build the observational variant");
  obsCmd->add_option("spec", specPath)->required();
  obsCmd->add_option("-o,--output", outPath, "output file (default stdout)");
  obsCmd->add_flag("--tpdb", tpdbFlag, "emit termination-competition TRS format");

  auto* unfoldCmd = app.add_subcommand("unfold", "unfold a symbol at a stream position");
  unfoldCmd->add_option("spec", specPath)->required();
  unfoldCmd->add_option("-f,--symbol", symbol, "stream symbol to unfold")->required();
  unfoldCmd->add_option("-i,--position", position, "1-based stream position")->required();
  unfoldCmd->add_option("-o,--output", outPath);

  auto* prove = app.add_subcommand("prove", "run the full well-definedness pipeline");
  prove->add_option("spec", specPath)->required();
  prove->add_option("--timeout", timeoutSeconds, "prover time budget in seconds");
  prove->add_option("--coeff-max", coeffMax, "max interpretation coefficient");
  prove->add_option("--tpdb-out", tpdbOut, "where to write the TPDB export on unknown");
  prove->add_option("--cert-out", certOut, "where to write the certificate");

  auto* eval = app.add_subcommand("eval", "compute a finite prefix of a stream term");
  eval->add_option("spec", specPath)->required();
  eval->add_option("-t,--term", termText, "ground stream term")->required();
  eval->add_option("-n,--count", count, "number of elements")->required();
  eval->add_option("--strategy", strategy, "obs|outermost (default outermost)")
      ->check(CLI::IsMember({"obs", "outermost"}));
  eval->add_option("--fuel", fuel, "rewrite steps per element");

  auto* turtle = app.add_subcommand("turtle", "render a prefix as an SVG turtle figure");
  turtle->add_option("spec", specPath)->required();
  turtle->add_option("-t,--term", termText)->required();
  turtle->add_option("-n,--count", count)->required();
  turtle->add_option("--angle0", turtleCfg.angle0,
                     "degrees turned on the first data element (positive = left)");
  turtle->add_option("--angle1", turtleCfg.angle1, "degrees turned on the second data element");
  turtle->add_option("--unit", turtleCfg.unit, "segment length");
  turtle->add_option("--heading", turtleCfg.startHeading, "initial heading in degrees");
  turtle->add_option("--strategy", strategy)->check(CLI::IsMember({"obs", "outermost"}));
  turtle->add_option("-o,--output", outPath, "output SVG file (default stdout)");
  turtle->add_option("--fuel", fuel);

  auto* goals = app.add_subcommand("goals", "emit a doubled spec with self-equality goals");
  goals->add_option("spec", specPath)->required();
  goals->add_option("-o,--output", outPath);

  auto* certify = app.add_subcommand("certify", "check equivalence proof scripts");
  certify->add_option("spec", specPath)->required();
  certify->add_option("proof", proofPath, "proof script file")->required();
  certify->add_option("--against", againstPath,
                      "second spec: check rule replacement preservation; the positional proof "
                      "file then holds the old-under-new scripts");
  certify->add_option("--reverse", reversePath, "new-under-old scripts for --against");

  auto* suggest = app.add_subcommand("suggest", "suggest an anchor equation for a constant");
  suggest->add_option("spec", specPath)->required();
  suggest->add_option("-c,--constant", constant)->required();
  suggest->add_option("-n,--count", count, "number of elements to anchor")->required();
  suggest->add_option("--fuel", fuel);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (app.got_subcommand(check)) return cmdCheck(specPath);
    if (app.got_subcommand(obsCmd)) return cmdObs(specPath, outPath, tpdbFlag);
    if (app.got_subcommand(unfoldCmd)) return cmdUnfold(specPath, symbol, position, outPath);
    if (app.got_subcommand(prove))
      return cmdProve(specPath, timeoutSeconds, coeffMax, tpdbOut, certOut, fuel);
    if (app.got_subcommand(eval)) return cmdEval(specPath, termText, count, strategy, fuel);
    if (app.got_subcommand(turtle))
      return cmdTurtle(specPath, termText, count, turtleCfg, strategy, outPath, fuel);
    if (app.got_subcommand(goals)) return cmdGoals(specPath, outPath);
    if (app.got_subcommand(certify))
      return cmdCertify(specPath, proofPath, againstPath, reversePath);
    if (app.got_subcommand(suggest)) return cmdSuggest(specPath, constant, count, fuel);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.code()) {
      case ErrorCode::Usage: return kUsage;
      case ErrorCode::NotComputable:
      case ErrorCode::FuelExhausted: return kUnknown;
      default: return kRefuted;
    }
  }
  return kUsage;
}
