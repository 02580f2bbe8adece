// Acceptance runner: one PASS/FAIL line per criterion, non-zero exit if any fails.
// Pass criterion numbers as arguments to run a subset.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "gen.hpp"
#include "trim/alias.hpp"
#include "trim/formula_engine.hpp"
#include "trim/infer.hpp"
#include "trim/interp.hpp"
#include "trim/pipeline.hpp"
#include "trim/syntax.hpp"

using namespace trim;
namespace tg = trim::testgen;

namespace {

using Clock = std::chrono::steady_clock;

double secondsSince(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

std::string slurp(const std::string& name) {
  std::ifstream in(std::string(TRIM_TEST_DATA) + "/" + name);
  if (!in) throw std::runtime_error("missing test data " + name);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Program load(const std::string& name) { return parseProgram(slurp(name), name); }

struct Verdict {
  bool pass = true;
  std::string detail;
  std::vector<std::string> notes;

  void fail(const std::string& why) {
    if (pass || notes.size() < 5) notes.push_back(why);
    pass = false;
  }
};

constexpr std::size_t kCorpusSize = 500;

// The generated corpus used by criteria 4, 5, 7, 8 and 9.
const std::vector<Program>& corpus() {
  static const std::vector<Program> programs = [] {
    std::vector<Program> out;
    for (std::size_t i = 0; i < kCorpusSize; ++i) {
      auto rng = tg::rngFor(i);
      out.push_back(tg::randomProgram(rng));
    }
    return out;
  }();
  return programs;
}

const std::vector<std::string> kDataFiles = {"empty.imp",   "example41.imp", "example52.imp",
                                             "example53.imp", "fig1_ai.imp",  "fig1_dse.imp"};

bool sameFormula(const Formula* got, const std::string& expected) {
  return got && simplify(*got) == simplify(parseFormula(expected));
}

// ---------------------------------------------------------------------------

Verdict goldens() {
  Verdict v;
  auto t0 = Clock::now();

  Program ex41 = load("example41.imp");
  auto inf = inferProgram(ex41, AliasOracle::build(ex41));
  struct Point {
    StmtPath path;
    const char* expected;
  };
  for (const Point& pt : {Point{{1}, "drf(y) = 3 && x != y"}, Point{{0, 1, 1}, "x != y"},
                          Point{{0, 1, 0}, "true"}}) {
    const Formula* got = inf.annotated.at("snippet", pt.path);
    if (!sameFormula(got, pt.expected))
      v.fail("example 4.1 expected " + std::string(pt.expected) + ", got " +
             (got ? toString(*got) : "nothing"));
  }

  Program ex52 = load("example52.imp");
  if (splitProcedures(ex52).program != parseProgram(slurp("example52.split.imp")))
    v.fail("example 5.2 split differs");

  Program ex53 = load("example53.imp");
  if (trimProgram(ex53, TrimConfig{}).program != parseProgram(slurp("example53.trimmed.imp")))
    v.fail("example 5.3 instrumentation differs");

  double s = secondsSince(t0);
  if (s >= 1.0) v.fail("took " + std::to_string(s) + " s");
  v.detail = std::to_string(s * 1000).substr(0, 5) + " ms";
  return v;
}

// ---------------------------------------------------------------------------

Verdict figureOne() {
  Verdict v;
  Program dse = load("fig1_dse.imp");
  Program trimmed = trimProgram(dse, TrimConfig{}).program;
  ExecConfig cfg;
  std::size_t failing = 0, originalPaths = 0, trimmedPaths = 0, worst = 0;
  for (const auto& sigma : scalarInputs(dse, 0, 10).enumerate()) {
    Exploration a = explore(dse, sigma, cfg);
    Exploration b = explore(trimmed, sigma, cfg);
    if (a.inconclusive || b.inconclusive) v.fail("bound hit at " + toString(sigma));
    originalPaths += a.results.size() - a.count(Outcome::AssumeFail);
    std::size_t complete = b.results.size() - b.count(Outcome::AssumeFail);
    trimmedPaths += complete;
    worst = std::max(worst, complete);
    if (b.anyFailure()) {
      ++failing;
      if (sigma.vars.at("m") != 5) v.fail("unexpected failure at " + toString(sigma));
    } else if (b.count(Outcome::AssumeFail) != b.results.size()) {
      v.fail("input not pruned: " + toString(sigma));
    }
    if (a.anyFailure() != b.anyFailure()) v.fail("failure differs at " + toString(sigma));
  }
  if (failing != 1) v.fail(std::to_string(failing) + " failing inputs");
  if (worst > 2) v.fail("trimmed has " + std::to_string(worst) + " paths on one input");
  if (originalPaths < 6) v.fail("original has only " + std::to_string(originalPaths) + " paths");

  Program ai = load("fig1_ai.imp");
  TrimResult r = trimProgram(ai, TrimConfig{});
  bool found = false;
  for (const auto& a : r.report.details) {
    // The entry of `fact` once its leading range assumption is in place.
    if (a.proc == "fact" && a.path.size() == 1 && a.path[0] <= 1 &&
        a.condition.nondetVars.empty() &&
        simplify(a.condition.predicate) == simplify(parseFormula("n != 0")))
      found = true;
  }
  if (!found) v.fail("no `assume n != 0` at the entry of fact");

  v.detail = "failing inputs " + std::to_string(failing) + ", paths original " +
             std::to_string(originalPaths) + " trimmed " + std::to_string(trimmedPaths) +
             " (max " + std::to_string(worst) + "/input)";
  return v;
}

// ---------------------------------------------------------------------------

Verdict wpImplication() {
  Verdict v;
  constexpr int kBlocks = 1000;
  auto t0 = Clock::now();
  ExecConfig cfg;
  std::size_t checks = 0, skipped = 0;
  for (int i = 0; i < kBlocks; ++i) {
    auto rng = tg::rngFor(100000 + static_cast<std::uint64_t>(i));
    Block b = tg::randomBlock(rng, 6);
    Formula post = tg::randomPost(rng);
    // The oracle has to account for the post's heap reads as well.
    Block withPost = b;
    withPost.push_back(Stmt::assumption(post));
    Program prog;
    prog.entry = "main";
    prog.procedures.push_back(Procedure{"main", {"a", "b", "p", "q"}, "r", withPost, {}});
    Formula pre = inferBlock(prog, "main", AliasOracle::build(prog), SummaryEnv{}, post, b);
    for (const auto& sigma : tg::blockInputsFor(b, post, -3, 3).enumerate()) {
      // Quantified values of the pre range a little beyond the input domain so
      // that witnesses built from sums still fit.
      auto holds = evaluate(pre, sigma.vars, sigma.heap, -3, 10);
      if (!holds) {
        ++skipped;
        continue;
      }
      if (!*holds) continue;
      ++checks;
      auto exact = exactWp(b, post, sigma, cfg);
      if (!exact) {
        ++skipped;
      } else if (!*exact) {
        v.fail("block " + std::to_string(i) + " at " + toString(sigma) + ": pre " +
               toString(pre) + " post " + toString(post));
        break;
      }
    }
  }
  double s = secondsSince(t0);
  if (s >= 60) v.fail("took " + std::to_string(s) + " s");
  v.detail = std::to_string(kBlocks) + " blocks, " + std::to_string(checks) + " checks, " +
             std::to_string(skipped) + " skipped, " + std::to_string(static_cast<int>(s)) + " s";
  return v;
}

// ---------------------------------------------------------------------------

Verdict probesNecessary() {
  Verdict v;
  auto t0 = Clock::now();
  const auto inputs = tg::programInputs().enumerate();
  const ExecConfig cfg = tg::programExecConfig();
  std::size_t failedRuns = 0, probeChecks = 0, inconclusive = 0;
  for (std::size_t i = 0; i < corpus().size(); ++i) {
    TrimConfig tc;
    tc.qe = i % 2 ? QeMode::Nondet : QeMode::Full;
    Program probed = trimProgram(corpus()[i], tc, EmitMode::Probe).program;
    for (const auto& sigma : inputs) {
      Exploration e = explore(probed, sigma, cfg);
      inconclusive += e.inconclusive;
      for (const auto& run : e.results) {
        if (!run.failed()) continue;
        ++failedRuns;
        for (const auto& hit : run.probes) {
          ++probeChecks;
          if (!hit.holds)
            v.fail("program " + std::to_string(i) + " probe " + std::to_string(hit.id) +
                   " false on a failing run from " + toString(sigma));
        }
      }
    }
  }
  double s = secondsSince(t0);
  if (s >= 120) v.fail("took " + std::to_string(s) + " s");
  if (failedRuns == 0) v.fail("no failing runs exercised");
  v.detail = std::to_string(corpus().size()) + " programs, " + std::to_string(failedRuns) +
             " failing runs, " + std::to_string(probeChecks) + " probe checks, " +
             std::to_string(inconclusive) + " inconclusive runs, " +
             std::to_string(static_cast<int>(s)) + " s";
  return v;
}

// ---------------------------------------------------------------------------

Verdict equiSafety() {
  Verdict v;
  auto t0 = Clock::now();
  const auto inputs = tg::programInputs().enumerate();
  const ExecConfig cfg = tg::programExecConfig();
  std::size_t pairs = 0, safe = 0, cex = 0, inconclusive = 0;
  for (std::size_t i = 0; i < corpus().size(); ++i) {
    for (const auto& preset : presets()) {
      ++pairs;
      Program trimmed = trimProgram(corpus()[i], preset.config).program;
      EquiSafeVerdict r = checkEquiSafe(corpus()[i], trimmed, inputs, cfg);
      switch (r.kind) {
        case EquiSafeVerdict::Kind::EquiSafe: ++safe; break;
        case EquiSafeVerdict::Kind::Inconclusive: ++inconclusive; break;
        case EquiSafeVerdict::Kind::Counterexample:
          ++cex;
          v.fail("program " + std::to_string(i) + " " + preset.name + ": " + r.text());
          break;
      }
    }
  }
  double rate = static_cast<double>(inconclusive) / static_cast<double>(pairs);
  if (rate >= 0.05) v.fail("inconclusive rate " + std::to_string(rate));
  v.detail = std::to_string(pairs) + " pairs, " + std::to_string(safe) + " equi-safe, " +
             std::to_string(cex) + " counterexamples, " + std::to_string(inconclusive) +
             " inconclusive, " + std::to_string(static_cast<int>(secondsSince(t0))) + " s";
  return v;
}

// ---------------------------------------------------------------------------

constexpr Int kFreeLo = -3, kFreeHi = 3, kQuantLo = -16, kQuantHi = 16;

std::optional<bool> truth(const Formula& f, const std::map<std::string, Int>& frame) {
  return evaluate(f, frame, {}, kQuantLo, kQuantHi);
}

Formula closeOver(const TrimmingCondition& c) {
  Formula f = c.predicate;
  for (auto it = c.nondetVars.rbegin(); it != c.nondetVars.rend(); ++it)
    f = Formula::exists(*it, f);
  return f;
}

Verdict weakening() {
  Verdict v;
  constexpr int kFormulas = 1000;
  std::size_t implications = 0, equivalences = 0;
  std::vector<std::map<std::string, Int>> frames;
  for (Int x = kFreeLo; x <= kFreeHi; ++x)
    for (Int y = kFreeLo; y <= kFreeHi; ++y)
      for (Int z = kFreeLo; z <= kFreeHi; ++z) frames.push_back({{"x", x}, {"y", y}, {"z", z}});

  for (int i = 0; i < kFormulas && v.notes.size() < 5; ++i) {
    auto rng = tg::rngFor(200000 + static_cast<std::uint64_t>(i));
    tg::QeSample sample = tg::randomQeFormula(rng, i % 2 == 0);
    Formula input = toNnf(sample.formula);
    TrimmingCondition qe = eliminateQuantifiers(input);
    Formula qeClosed = closeOver(qe);
    // Exact below the cap for existential unit-coefficient input.
    bool exact = sample.unitLinear && qe.nondetVars.empty() && i % 2 == 0;
    std::vector<Formula> bounded;
    for (std::size_t k = 1; k <= 3; ++k) bounded.push_back(boundConjuncts(input, k));

    for (const auto& frame : frames) {
      auto in = truth(input, frame);
      if (!in) continue;
      auto out = truth(qeClosed, frame);
      ++implications;
      if (*in && out && !*out)
        v.fail("QE not implied, formula " + toString(input) + " -> " + toString(qeClosed));
      if (exact && out) {
        ++equivalences;
        if (*in != *out)
          v.fail("QE not exact, formula " + toString(input) + " -> " + toString(qeClosed));
      }
      for (const auto& b : bounded) {
        auto w = truth(b, frame);
        ++implications;
        if (*in && w && !*w)
          v.fail("boundConjuncts not implied, " + toString(input) + " -> " + toString(b));
      }
      if (!v.pass) break;
    }
  }
  v.detail = std::to_string(kFormulas) + " formulas, " + std::to_string(implications) +
             " implication checks, " + std::to_string(equivalences) + " equivalence checks";
  return v;
}

// ---------------------------------------------------------------------------

// A mutant is only worth counting if it differs from the original: some
// input where the original cannot fail reaches the assert with its predicate
// true, so negating it must add a failure there. This is decided on the
// original alone, without checkEquiSafe.
bool killable(const Program& p, const Stmt* target, const std::vector<Valuation>& inputs,
              const ExecConfig& cfg) {
  for (const auto& s : inputs) {
    bool reached = false;
    StepObserver seen = [&](const StepEvent& e) {
      if (&e.stmt == target &&
          evaluate(target->pred, e.frame, e.heap, cfg.nondetLo, cfg.nondetHi) == true)
        reached = true;
    };
    Exploration e = explore(p, s, cfg, &seen);
    if (reached && e.inconclusive == 0 && !e.anyFailure()) return true;
  }
  return false;
}

Verdict mutation() {
  Verdict v;
  constexpr std::size_t kMutants = 50;
  const auto inputs = tg::programInputs().enumerate();
  const ExecConfig cfg = tg::programExecConfig();
  std::size_t made = 0, caught = 0, skipped = 0;
  for (std::size_t i = 0; i < corpus().size() && made < kMutants; ++i) {
    const Program& original = corpus()[i];
    std::size_t n = tg::countAsserts(original);
    std::optional<std::size_t> site;
    for (std::size_t k = 0; k < n && !site; ++k)
      if (killable(original, tg::assertAt(original, (i + k) % n), inputs, cfg)) site = (i + k) % n;
    if (!site) {
      ++skipped;
      continue;
    }
    Program mutant = original;
    tg::negateAssert(mutant, *site);
    ++made;
    Program trimmed = trimProgram(mutant, TrimConfig{}).program;
    if (checkEquiSafe(original, trimmed, inputs, cfg).kind ==
        EquiSafeVerdict::Kind::Counterexample)
      ++caught;
  }
  if (made < kMutants) v.fail("only " + std::to_string(made) + " mutants");
  if (caught * 100 < made * 95) v.fail("too few counterexamples");
  v.detail = std::to_string(caught) + "/" + std::to_string(made) + " mutants caught, " +
             std::to_string(skipped) + " programs without a distinguishing assert";
  return v;
}

// ---------------------------------------------------------------------------

Verdict performance() {
  Verdict v;
  std::vector<Program> files;
  for (const auto& name : kDataFiles) files.push_back(load(name));
  for (std::size_t i = 0; i < 200; ++i) files.push_back(corpus()[i]);
  std::vector<double> millis;
  std::size_t largest = 0;
  for (const auto& p : files) {
    largest = std::max(largest, nodeCount(p));
    if (nodeCount(p) > 200) continue;
    auto t0 = Clock::now();
    TrimResult r = trimProgram(p, TrimConfig{});
    millis.push_back(secondsSince(t0) * 1000);
  }
  std::sort(millis.begin(), millis.end());
  double median = millis.empty() ? 0 : millis[millis.size() / 2];
  if (millis.size() < files.size() / 2) v.fail("too many programs over 200 nodes");
  if (median >= 100) v.fail("median " + std::to_string(median) + " ms");
  char buf[160];
  std::snprintf(buf, sizeof buf, "%zu programs, median %.3f ms, max %.3f ms, largest %zu nodes",
                millis.size(), median, millis.empty() ? 0.0 : millis.back(), largest);
  v.detail = buf;
  return v;
}

// ---------------------------------------------------------------------------

Verdict roundTrip() {
  Verdict v;
  std::size_t checked = 0;
  auto check = [&](const Program& p, const std::string& what) {
    ++checked;
    std::string text = print(p);
    Program back;
    try {
      back = parseProgram(text, what, p.entry);
    } catch (const std::exception& e) {
      v.fail(what + ": " + e.what());
      return;
    }
    if (back != p) v.fail(what + " differs after parse(print(.))");
  };
  for (const auto& name : kDataFiles) check(load(name), name);
  for (const auto& name : {"example52.split.imp", "example53.trimmed.imp"})
    check(load(name), name);
  for (std::size_t i = 0; i < corpus().size(); ++i) {
    check(corpus()[i], "corpus " + std::to_string(i));
    if (i < 100)
      check(trimProgram(corpus()[i], presets()[i % presets().size()].config).program,
            "trimmed corpus " + std::to_string(i));
  }
  for (int i = 0; i < 500; ++i) {
    auto rng = tg::rngFor(100000 + static_cast<std::uint64_t>(i));
    Program prog;
    prog.entry = "main";
    prog.procedures.push_back(Procedure{"main", {"a", "b", "p", "q"}, "r", tg::randomBlock(rng, 6), {}});
    check(prog, "block " + std::to_string(i));
  }
  v.detail = std::to_string(checked) + " programs";
  return v;
}

struct Criterion {
  int id;
  const char* name;
  std::function<Verdict()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, "golden worked examples", goldens},
      {2, "factorial analogues", figureOne},
      {3, "inferred condition implies exact wp", wpImplication},
      {4, "trimming conditions hold on failing runs", probesNecessary},
      {5, "equi-safety under every preset", equiSafety},
      {6, "weakening soundness", weakening},
      {7, "mutation sensitivity", mutation},
      {8, "trimming time", performance},
      {9, "parse/print round trip", roundTrip},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

  std::cout << "seed " << tg::baseSeed() << "\n";
  int failures = 0;
  for (const auto& c : all) {
    if (!only.empty() && !only.count(c.id)) continue;
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v.fail(std::string("exception: ") + e.what());
    }
    std::cout << "criterion " << c.id << ": " << (v.pass ? "PASS" : "FAIL") << " " << c.name;
    if (!v.detail.empty()) std::cout << " (" << v.detail << ")";
    std::cout << "\n";
    for (const auto& n : v.notes) std::cout << "    " << n << "\n";
    std::cout.flush();
    failures += !v.pass;
  }
  return failures == 0 ? 0 : 1;
}
