#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "trim/instrument.hpp"
#include "trim/interp.hpp"
#include "trim/pipeline.hpp"
#include "trim/syntax.hpp"

using namespace trim;

namespace {

std::string slurp(const std::string& name) {
  std::ifstream in(std::string(TRIM_TEST_DATA) + "/" + name);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Program load(const std::string& name) { return parseProgram(slurp(name), name); }

std::size_t countCalls(const Block& b) {
  std::size_t n = 0;
  for (const auto& s : b) {
    n += s.kind == StmtKind::Call;
    n += countCalls(s.thenBranch) + countCalls(s.elseBranch);
  }
  return n;
}

}  // namespace

TEST(Split, ExampleListing) {
  SplitProgram s = splitProcedures(load("example52.imp"));
  EXPECT_EQ(s.program, parseProgram(slurp("example52.split.imp")));
  EXPECT_EQ(s.cloneOf.at("foo"), "foo__safe");
  EXPECT_EQ(s.cloneOf.at("bar"), "bar__safe");
  EXPECT_EQ(print(s.program), slurp("example52.split.imp"));
}

TEST(Split, NoCallsUnchanged) {
  Program p = parseProgram("proc main(a) : r { assert a > 0; }");
  EXPECT_EQ(splitProcedures(p).program, p);
}

TEST(Split, ChainMakesThreeClones) {
  Program p = parseProgram(
      "proc c(x) : r { assert x > 0; }\n"
      "proc b(x) : r { call c(x); }\n"
      "proc a(x) : r { call b(x); }\n"
      "proc main(x) : r { call a(x); }");
  SplitProgram s = splitProcedures(p);
  EXPECT_EQ(s.cloneOf.size(), 3u);
  std::size_t sites = 0;
  for (const auto& proc : s.program.procedures) {
    if (proc.name.find(kSafeSuffix) != std::string::npos) continue;
    for (const auto& st : proc.body) sites += isSplitCallSite(st, s.cloneOf);
  }
  EXPECT_EQ(sites, 3u);
  // Two paths through each site, one ending in `assume false`.
  auto e = explore(s.program, Valuation{{{"x", 1}}, {}});
  EXPECT_EQ(e.count(Outcome::Ok), 1u);
  EXPECT_EQ(e.count(Outcome::AssumeFail), 3u);
}

TEST(Instrument, ExampleListing) {
  TrimResult r = trimProgram(load("example53.imp"), TrimConfig{});
  EXPECT_EQ(r.program, parseProgram(slurp("example53.trimmed.imp")));
  EXPECT_EQ(print(r.program), slurp("example53.trimmed.imp"));
}

TEST(Instrument, NoAssertsAssumesFalseAtEntry) {
  TrimResult r = trimProgram(load("empty.imp"), TrimConfig{});
  const Procedure& main = r.program.entryProcedure();
  ASSERT_FALSE(main.body.empty());
  EXPECT_EQ(main.body[0], Stmt::assumption(Formula::falsity()));
  EXPECT_EQ(r.report.assumes, 1u);
}

TEST(Instrument, FactorialBeforeCall) {
  TrimResult r = trimProgram(load("fig1_dse.imp"), *presetConfig("trim_L"));
  std::string text = print(r.program);
  auto at = text.find("assume m = 5;");
  ASSERT_NE(at, std::string::npos) << text;
  EXPECT_LT(at, text.find("f := call fact__safe(m);"));
  std::size_t nonTrivial = 0;
  for (const auto& a : r.report.details) nonTrivial += !a.trivial();
  EXPECT_EQ(nonTrivial, 1u);
}

TEST(Instrument, FactorialEntryAssumption) {
  TrimResult r = trimProgram(load("fig1_ai.imp"), TrimConfig{});
  const Procedure* fact = r.program.find("fact");
  ASSERT_NE(fact, nullptr);
  ASSERT_GE(fact->body.size(), 2u);
  EXPECT_EQ(fact->body[1], Stmt::assumption(parseFormula("n != 0")));
}

TEST(Instrument, NondetModeEmitsWitnesses) {
  // The existential in the negated condition is not linear, so full QE can
  // only weaken it to true while nondet mode keeps it.
  Program p = parseProgram("proc main(a) : r { b := nondet(); assert a != b * b; }");
  TrimConfig cfg;
  cfg.qe = QeMode::Nondet;
  TrimResult r = trimProgram(p, cfg);
  const Block& body = r.program.entryProcedure().body;
  ASSERT_EQ(body.size(), 4u);
  EXPECT_EQ(body[0].kind, StmtKind::Havoc);
  EXPECT_EQ(body[1], Stmt::assumption(parseFormula("a = _q1 * _q1")));

  cfg.qe = QeMode::Full;
  EXPECT_EQ(trimProgram(p, cfg).program, p);
}

TEST(Instrument, UniversalEliminatedExactly) {
  // Safety is forall b. a != b, i.e. false: nothing to prune.
  Program p = parseProgram("proc main(a) : r { b := nondet(); assert a != b; }");
  for (QeMode mode : {QeMode::Full, QeMode::Nondet}) {
    TrimConfig cfg;
    cfg.qe = mode;
    EXPECT_EQ(trimProgram(p, cfg).program, p);
  }
}

TEST(Instrument, ProbeModeKeepsBehaviour) {
  Program p = load("fig1_dse.imp");
  TrimResult r = trimProgram(p, TrimConfig{}, EmitMode::Probe);
  for (Int m = 0; m <= 6; ++m) {
    Valuation s{{{"m", m}}, {}};
    auto e = explore(r.program, s);
    EXPECT_EQ(e.anyFailure(), m == 5);
    for (const auto& run : e.results) {
      if (!run.failed()) continue;
      EXPECT_FALSE(run.probes.empty());
      for (const auto& hit : run.probes) EXPECT_TRUE(hit.holds);
    }
  }
}

TEST(Presets, TableMatrix) {
  struct Row {
    const char* name;
    std::optional<std::size_t> mc;
    QeMode qe;
    bool conds;
  };
  const std::vector<Row> rows = {
      {"trim_LB", 4, QeMode::Full, false},  {"trim_B", 4, QeMode::Full, true},
      {"trim_NDB", 4, QeMode::Nondet, true}, {"trim_L", std::nullopt, QeMode::Full, false},
      {"trim", std::nullopt, QeMode::Full, true}, {"trim_ND", std::nullopt, QeMode::Nondet, true},
  };
  ASSERT_EQ(presets().size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Preset& p = presets()[i];
    EXPECT_EQ(p.name, rows[i].name);
    EXPECT_EQ(p.config.maxConjuncts, rows[i].mc) << p.name;
    EXPECT_EQ(p.config.qe, rows[i].qe) << p.name;
    EXPECT_TRUE(p.config.placement.beforeCalls) << p.name;
    EXPECT_EQ(p.config.placement.beforeConditionals, rows[i].conds) << p.name;
    EXPECT_EQ(presetConfig(rows[i].name)->qe, rows[i].qe);
  }
  EXPECT_FALSE(presetConfig("trim_X").has_value());
}

TEST(Instrument, Deterministic) {
  Program p = load("example52.imp");
  for (const auto& preset : presets())
    EXPECT_EQ(print(trimProgram(p, preset.config).program),
              print(trimProgram(p, preset.config).program));
}

TEST(Placement, CallsAndConditionals) {
  Program p = parseProgram(
      "proc g(x) : r { assert x > 0; }\n"
      "proc main(a) : r { if (a > 0) { b := 1; } call g(a); }");
  SplitProgram s = splitProcedures(p);
  PlacementStrategy none{false, false, false};
  EXPECT_TRUE(placementPoints(*s.program.find("main"), none, s.cloneOf).empty());
  PlacementStrategy calls{false, true, false};
  EXPECT_EQ(placementPoints(*s.program.find("main"), calls, s.cloneOf).size(), 1u);
  PlacementStrategy conds{false, false, true};
  EXPECT_EQ(placementPoints(*s.program.find("main"), conds, s.cloneOf),
            std::vector<StmtPath>{{0}});
  // The entry and the leading conditional share a point.
  PlacementStrategy all{true, true, true};
  EXPECT_EQ(placementPoints(*s.program.find("main"), all, s.cloneOf),
            (std::vector<StmtPath>{{0}, {1}}));
  EXPECT_EQ(countCalls(s.program.find("main")->body), 2u);
}

TEST(Instrument, WitnessesStayDistinct) {
  // The nested bound `r`s are renamed apart to `_q` names before emission;
  // emission must not merge them with its own witnesses.
  Program p = parseProgram(
      "proc g(x) : r { }\n"
      "proc main(a, b) : r { call g(a); r := nondet(); assert r * r != a; "
      "r := nondet(); assert r * r != b; r := nondet(); assert r * r != a + b; }");
  TrimConfig cfg;
  cfg.qe = QeMode::Nondet;
  TrimResult t = trimProgram(p, cfg);
  std::size_t havocs = 0;
  const Formula* assumed = nullptr;
  for (const auto& s : t.program.entryProcedure().body) {
    havocs += s.kind == StmtKind::Havoc && s.target.rfind("_q", 0) == 0;
    if (s.kind == StmtKind::Assume && !assumed) assumed = &s.pred;
  }
  ASSERT_EQ(havocs, 3u) << print(t.program);
  ASSERT_NE(assumed, nullptr);
  std::size_t witnesses = 0;
  for (const auto& v : freeVars(*assumed)) witnesses += v.rfind("_q", 0) == 0;
  EXPECT_EQ(witnesses, 3u) << toString(*assumed);
}
