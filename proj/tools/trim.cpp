#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "trim/alias.hpp"
#include "trim/infer.hpp"
#include "trim/interp.hpp"
#include "trim/pipeline.hpp"
#include "trim/syntax.hpp"

namespace fs = std::filesystem;
using namespace trim;

namespace {

constexpr int kUsage = 64;
constexpr int kDataErr = 65;
constexpr int kNoInput = 66;
constexpr int kSoftware = 70;

struct Usage : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NoInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string describe(const TrimError& e) {
  if (!e.span().known()) return e.what();
  return toString(e.span()) + ": " + e.what();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NoInput("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw NoInput("cannot write " + path);
  out << text;
}

Program load(const std::string& path, const std::string& entry) {
  std::optional<std::string> e;
  if (!entry.empty()) e = entry;
  return parseProgram(slurp(path), path, e);
}

Int parseInt(const std::string& s) {
  try {
    std::size_t used = 0;
    long long v = std::stoll(s, &used);
    if (used != s.size()) throw Usage("not an integer: " + s);
    return v;
  } catch (const std::logic_error&) {
    throw Usage("not an integer: " + s);
  }
}

std::vector<std::string> splitList(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep))
    if (!cur.empty()) out.push_back(cur);
  return out;
}

std::pair<Int, Int> parseRange(const std::string& s) {
  auto dots = s.find("..");
  if (dots == std::string::npos) throw Usage("expected lo..hi, got " + s);
  Int lo = parseInt(s.substr(0, dots));
  Int hi = parseInt(s.substr(dots + 2));
  if (lo > hi) throw Usage("empty range " + s);
  return {lo, hi};
}

std::map<std::string, Int> parseBindings(const std::string& s) {
  std::map<std::string, Int> out;
  for (const auto& item : splitList(s, ',')) {
    auto eq = item.find('=');
    if (eq == std::string::npos) throw Usage("expected name=value, got " + item);
    out[item.substr(0, eq)] = parseInt(item.substr(eq + 1));
  }
  return out;
}

PlacementStrategy parsePlacement(const std::string& s) {
  PlacementStrategy p{false, false, false};
  for (const auto& item : splitList(s, ',')) {
    if (item == "entry") {
      p.atEntry = true;
    } else if (item == "calls") {
      p.beforeCalls = true;
    } else if (item == "conds") {
      p.beforeConditionals = true;
    } else if (item == "all") {
      p = PlacementStrategy{};
    } else if (item != "none") {
      throw Usage("unknown placement " + item + " (entry, calls, conds, all, none)");
    }
  }
  return p;
}

QeMode parseQe(const std::string& s) {
  if (s == "full") return QeMode::Full;
  if (s == "nondet") return QeMode::Nondet;
  throw Usage("unknown qe mode " + s + " (full, nondet)");
}

IntMode parseIntMode(const std::string& s) {
  if (s == "math") return IntMode::Math;
  if (s == "wrap32") return IntMode::Wrap32;
  throw Usage("unknown int mode " + s + " (math, wrap32)");
}

std::optional<std::size_t> parseMc(const std::string& s) {
  if (s == "inf" || s == "unbounded") return std::nullopt;
  Int v = parseInt(s);
  if (v <= 0) throw Usage("--mc must be positive");
  return static_cast<std::size_t>(v);
}

struct TrimFlags {
  std::string preset, mc, qe, place, intMode, config;
  std::optional<bool> keepTrivial;

  TrimConfig resolve() const {
    TrimConfig c;
    if (!preset.empty()) {
      auto p = presetConfig(preset);
      if (!p) throw Usage("unknown preset " + preset);
      c = *p;
    }
    if (!config.empty()) {
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(slurp(config));
      } catch (const nlohmann::json::exception& e) {
        throw Usage("bad config " + config + ": " + e.what());
      }
      for (const auto& [k, v] : j.items()) {
        if (k == "preset") {
          auto p = presetConfig(v.get<std::string>());
          if (!p) throw Usage("unknown preset in config");
          c = *p;
        } else if (k == "qe") {
          c.qe = parseQe(v.get<std::string>());
        } else if (k == "max-conjuncts") {
          c.maxConjuncts = parseMc(v.is_string() ? v.get<std::string>()
                                                 : std::to_string(v.get<long long>()));
        } else if (k == "dnf-cap") {
          c.dnfCap = v.get<std::size_t>();
        } else if (k == "place") {
          c.placement = parsePlacement(v.get<std::string>());
        } else if (k == "int") {
          c.intMode = parseIntMode(v.get<std::string>());
        } else if (k == "keep-trivial") {
          c.keepTrivial = v.get<bool>();
        } else {
          throw Usage("unknown config key " + k);
        }
      }
    }
    if (!mc.empty()) c.maxConjuncts = parseMc(mc);
    if (!qe.empty()) c.qe = parseQe(qe);
    if (!place.empty()) c.placement = parsePlacement(place);
    if (!intMode.empty()) c.intMode = parseIntMode(intMode);
    if (keepTrivial) c.keepTrivial = *keepTrivial;
    return c;
  }
};

struct ExecFlags {
  std::string nondet = "-3..3";
  std::size_t forkBound = 64;
  std::size_t stepBound = 100000;
  std::string intMode = "math";

  ExecConfig resolve() const {
    ExecConfig c;
    std::tie(c.nondetLo, c.nondetHi) = parseRange(nondet);
    c.forkBound = forkBound;
    c.stepBound = stepBound;
    c.intMode = parseIntMode(intMode);
    try {
      c.validate();
    } catch (const std::invalid_argument& e) {
      throw Usage(e.what());
    }
    return c;
  }
};

void addExecFlags(CLI::App* cmd, ExecFlags& f) {
  cmd->add_option("--nondet", f.nondet, "Domain of nondeterministic values, lo..hi");
  cmd->add_option("--fork-bound", f.forkBound, "Decisions per run");
  cmd->add_option("--step-bound", f.stepBound, "Statements per run");
  cmd->add_option("--int", f.intMode, "math or wrap32");
}

std::vector<Valuation> inputsFor(const Program& p, const std::string& domain,
                                 const std::string& fixed, const std::string& heap) {
  auto bound = parseBindings(fixed);
  auto [lo, hi] = parseRange(domain);
  InputSpace space;
  for (const auto& param : p.entryProcedure().params) {
    auto it = bound.find(param);
    space.vars.emplace_back(param, it != bound.end() ? std::vector<Int>{it->second}
                                                     : InputSpace::range(lo, hi));
  }
  for (const auto& [k, v] : bound)
    if (std::none_of(space.vars.begin(), space.vars.end(), [&](const auto& a) { return a.first == k; }))
      throw Usage("no parameter named " + k);
  std::vector<Valuation> out = space.enumerate();
  auto cells = parseBindings(heap);
  for (auto& v : out)
    for (const auto& [addr, val] : cells) v.heap[parseInt(addr)] = val;
  return out;
}

std::string trimmedName(const fs::path& in) {
  return in.stem().string() + ".trimmed" + in.extension().string();
}

std::string summaryLine(const std::string& file, const TrimReport& r) {
  char ms[32];
  std::snprintf(ms, sizeof ms, "%.3f", r.millis);
  return file + ": assumes " + std::to_string(r.assumes) + ", non-trivial " +
         std::to_string(r.nonTrivial) + ", time-ms " + ms;
}

int cmdTrim(const std::vector<std::string>& inputs, const std::string& out, const std::string& batch,
            const std::string& report, const std::string& entry, const TrimFlags& flags,
            bool probes, bool dumpAliases, bool dumpConds) {
  const TrimConfig cfg = flags.resolve();
  const EmitMode mode = probes ? EmitMode::Probe : EmitMode::Assume;

  if (!batch.empty()) {
    if (!inputs.empty()) throw Usage("--batch takes no positional inputs");
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(batch))
      if (e.is_regular_file() && e.path().extension() == ".imp" &&
          e.path().stem().extension() != ".trimmed")
        files.push_back(e.path());
    std::sort(files.begin(), files.end());
    fs::path outDir = out.empty() ? fs::path(batch) : fs::path(out);
    fs::create_directories(outDir);
    std::vector<std::future<std::string>> jobs;
    for (const auto& f : files) {
      jobs.push_back(std::async(std::launch::async, [f, outDir, cfg, mode, entry] {
        TrimResult r = trimProgram(load(f.string(), entry), cfg, mode);
        spit((outDir / trimmedName(f)).string(), print(r.program));
        return summaryLine(f.string(), r.report);
      }));
    }
    int rc = 0;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      try {
        std::cout << jobs[i].get() << "\n";
      } catch (const TrimError& e) {
        std::cerr << describe(e) << "\n";
        rc = kDataErr;
      }
    }
    return rc;
  }

  if (inputs.empty()) throw Usage("no input file");
  if (inputs.size() > 1 && !out.empty()) throw Usage("-o takes a single input; use --batch");
  for (const auto& in : inputs) {
    Program p = load(in, entry);
    TrimResult r = trimProgram(p, cfg, mode);
    if (dumpAliases) std::cerr << AliasOracle::build(r.split.program).dump();
    if (dumpConds) std::cerr << dumpConditions(r.inference.annotated);
    if (!out.empty()) {
      spit(out, print(r.program));
      std::cout << r.report.text();
    } else {
      std::cout << print(r.program);
      std::cerr << r.report.text();
    }
    if (inputs.size() > 1) std::cerr << summaryLine(in, r.report) << "\n";
    if (!report.empty()) spit(report, r.report.structured());
  }
  return 0;
}

void printResult(const ExecutionResult& r) {
  if (r.outcome) {
    std::cout << "outcome: " << toString(*r.outcome) << "\n";
  } else {
    std::cout << "outcome: inconclusive (" << r.inconclusive << ")\n";
  }
  if (r.ret && r.outcome == Outcome::Ok) std::cout << "return: " << *r.ret << "\n";
  std::cout << "decisions:";
  for (Int d : r.decisions) std::cout << " " << d;
  std::cout << "\nsteps: " << r.steps << "\n";
  for (const auto& h : r.probes)
    std::cout << "probe " << h.id << ": " << (h.holds ? "holds" : "violated") << "\n";
}

int cmdRun(const std::string& file, const std::string& entry, const std::string& inputs,
           const std::string& heap, const std::string& decisions, const ExecFlags& ef) {
  Program p = load(file, entry);
  Valuation sigma;
  sigma.vars = parseBindings(inputs);
  for (const auto& [a, v] : parseBindings(heap)) sigma.heap[parseInt(a)] = v;
  std::vector<Int> ds;
  for (const auto& d : splitList(decisions, ',')) ds.push_back(parseInt(d));
  ExecutionResult r;
  try {
    r = run(p, sigma, ds, ef.resolve());
  } catch (const std::invalid_argument& e) {
    throw Usage(e.what());
  }
  printResult(r);
  return 0;
}

int cmdExplore(const std::string& file, const std::string& entry, const std::string& domain,
               const std::string& inputs, const std::string& heap, const ExecFlags& ef) {
  Program p = load(file, entry);
  ExecConfig cfg = ef.resolve();
  std::size_t runs = 0, failures = 0, failingInputs = 0, inconclusive = 0, complete = 0;
  auto sigmas = inputsFor(p, domain, inputs, heap);
  for (const auto& sigma : sigmas) {
    Exploration e = explore(p, sigma, cfg);
    std::size_t fails = e.count(Outcome::AssertFail);
    std::cout << toString(sigma) << ": runs " << e.results.size() << ", ok " << e.count(Outcome::Ok)
              << ", blocked " << e.count(Outcome::AssumeFail) << ", failures " << fails
              << ", inconclusive " << e.inconclusive << "\n";
    runs += e.results.size();
    failures += fails;
    complete += e.results.size() - e.count(Outcome::AssumeFail);
    failingInputs += fails ? 1 : 0;
    inconclusive += e.inconclusive;
  }
  std::cout << "total: inputs " << sigmas.size() << ", runs " << runs << ", complete " << complete
            << ", failures " << failures << ", failing inputs " << failingInputs
            << ", inconclusive " << inconclusive << "\n";
  return 0;
}

int cmdCheck(const std::string& a, const std::string& b, const std::string& entry,
             const std::string& domain, const std::string& inputs, const std::string& heap,
             const std::string& report, const ExecFlags& ef) {
  Program p = load(a, entry);
  Program q = load(b, entry);
  if (p.entryProcedure().params != q.entryProcedure().params)
    throw Usage("entry procedures have different parameters");
  EquiSafeVerdict v = checkEquiSafe(p, q, inputsFor(p, domain, inputs, heap), ef.resolve());
  std::cout << v.text() << "\n";
  if (!report.empty()) {
    std::string s = "verdict = ";
    s += v.kind == EquiSafeVerdict::Kind::EquiSafe       ? "equi-safe"
         : v.kind == EquiSafeVerdict::Kind::Inconclusive ? "inconclusive"
                                                         : "counterexample";
    s += "\nchecked = " + std::to_string(v.checked) + "\ninconclusive = " +
         std::to_string(v.inconclusive) + "\n";
    if (v.counterexample) {
      s += "counterexample.sigma = " + toString(v.counterexample->sigma) + "\n";
      s += "counterexample.reason = " + v.counterexample->reason + "\n";
    }
    spit(report, s);
  }
  switch (v.kind) {
    case EquiSafeVerdict::Kind::EquiSafe:
      return 0;
    case EquiSafeVerdict::Kind::Counterexample:
      return 1;
    case EquiSafeVerdict::Kind::Inconclusive:
      return 2;
  }
  return kSoftware;
}

int cmdDump(const std::string& file, const std::string& entry, bool aliases, bool conditions) {
  Program p = load(file, entry);
  if (!aliases && !conditions) aliases = conditions = true;
  AliasOracle oracle = AliasOracle::build(p);
  if (aliases) std::cout << oracle.dump();
  if (conditions) std::cout << dumpConditions(inferProgram(p, oracle).annotated);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Failure-directed program trimming"};
  app.require_subcommand(1);
  std::string entry;
  app.add_option("--entry", entry, "Entry procedure (default: main, else the last one)");

  auto* trimCmd = app.add_subcommand("trim", "Insert trimming assumptions");
  std::vector<std::string> trimInputs;
  std::string out, batch, report;
  TrimFlags tf;
  bool probes = false, dumpAliases = false, dumpConds = false;
  trimCmd->add_option("inputs", trimInputs, "Input programs");
  trimCmd->add_option("-o,--output", out, "Output file (directory with --batch)");
  trimCmd->add_option("--batch", batch, "Trim every .imp file of a directory");
  trimCmd->add_option("--report", report, "Write a key = value report");
  trimCmd->add_option("--preset", tf.preset, "trim_LB, trim_B, trim_NDB, trim_L, trim, trim_ND");
  trimCmd->add_option("--mc", tf.mc, "Maximum conjuncts, or inf");
  trimCmd->add_option("--qe", tf.qe, "full or nondet");
  trimCmd->add_option("--place", tf.place, "Comma list of entry, calls, conds; or all, none");
  trimCmd->add_option("--int", tf.intMode, "math or wrap32");
  trimCmd->add_option("--config", tf.config, "JSON file with preset, qe, max-conjuncts, dnf-cap, place, int, keep-trivial");
  trimCmd->add_flag("--keep-trivial,!--drop-trivial", tf.keepTrivial,
                    "Emit assume false into assertion-free entry procedures");
  trimCmd->add_flag("--probes", probes, "Emit probes instead of assumptions");
  trimCmd->add_flag("--dump-aliases", dumpAliases, "Print points-to sets to stderr");
  trimCmd->add_flag("--dump-conditions", dumpConds, "Print safety conditions to stderr");

  auto* runCmd = app.add_subcommand("run", "Execute once");
  std::string file, inputs, heap, decisions, domain = "-3..3";
  ExecFlags ef;
  runCmd->add_option("file", file)->required();
  runCmd->add_option("--inputs", inputs, "name=value,...");
  runCmd->add_option("--heap", heap, "address=value,...");
  runCmd->add_option("--decisions", decisions, "Comma list of choices");
  addExecFlags(runCmd, ef);

  auto* exploreCmd = app.add_subcommand("explore", "Enumerate executions");
  exploreCmd->add_option("file", file)->required();
  exploreCmd->add_option("--domain", domain, "Range of unfixed parameters, lo..hi");
  exploreCmd->add_option("--inputs", inputs, "Fixed parameters, name=value,...");
  exploreCmd->add_option("--heap", heap, "address=value,...");
  addExecFlags(exploreCmd, ef);

  auto* checkCmd = app.add_subcommand("check", "Check equi-safety of two programs");
  std::string other;
  checkCmd->add_option("original", file)->required();
  checkCmd->add_option("trimmed", other)->required();
  checkCmd->add_option("--domain", domain, "Range of unfixed parameters, lo..hi");
  checkCmd->add_option("--inputs", inputs, "Fixed parameters, name=value,...");
  checkCmd->add_option("--heap", heap, "address=value,...");
  checkCmd->add_option("--report", report, "Write a key = value report");
  addExecFlags(checkCmd, ef);

  auto* dumpCmd = app.add_subcommand("dump", "Print analysis results");
  bool aliases = false, conditions = false;
  dumpCmd->add_option("file", file)->required();
  dumpCmd->add_flag("--aliases", aliases, "Points-to sets");
  dumpCmd->add_flag("--conditions", conditions, "Safety conditions");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*trimCmd)
      return cmdTrim(trimInputs, out, batch, report, entry, tf, probes, dumpAliases, dumpConds);
    if (*runCmd) return cmdRun(file, entry, inputs, heap, decisions, ef);
    if (*exploreCmd) return cmdExplore(file, entry, domain, inputs, heap, ef);
    if (*checkCmd) return cmdCheck(file, other, entry, domain, inputs, heap, report, ef);
    if (*dumpCmd) return cmdDump(file, entry, aliases, conditions);
  } catch (const Usage& e) {
    std::cerr << "trim: " << e.what() << "\n";
    return kUsage;
  } catch (const NoInput& e) {
    std::cerr << "trim: " << e.what() << "\n";
    return kNoInput;
  } catch (const TrimError& e) {
    std::cerr << describe(e) << "\n";
    return kDataErr;
  } catch (const std::exception& e) {
    std::cerr << "trim: internal error: " << e.what() << "\n";
    return kSoftware;
  }
  return kUsage;
}
