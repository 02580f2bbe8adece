#include <gtest/gtest.h>

#include "trim/formula.hpp"
#include "trim/syntax.hpp"

using namespace trim;

namespace {

Formula F(const char* s) { return parseFormula(s); }
Term T(const char* s) { return parseTerm(s); }
std::string S(const Formula& f) { return toString(f); }

}  // namespace

TEST(FreeVars, BinderRemoved) {
  EXPECT_EQ(freeVars(F("forall v. v > x")), (std::set<std::string>{"x"}));
  EXPECT_TRUE(freeVars(F("true")).empty());
  EXPECT_EQ(freeVars(F("drf(y) = 3 && x != y")), (std::set<std::string>{"x", "y"}));
}

TEST(Derefs, CollectsEveryLevel) {
  EXPECT_EQ(derefs(F("drf(y) = 3 && x != y")), (std::set<Term>{T("y")}));
  EXPECT_TRUE(derefs(F("x > 0")).empty());
  EXPECT_EQ(derefs(F("drf(drf(p)) = 1")), (std::set<Term>{T("drf(p)"), T("p")}));
}

TEST(Substitute, Basic) {
  EXPECT_EQ(S(substitute(F("x > 0"), T("x"), T("5"))), "5 > 0");
  EXPECT_EQ(substitute(F("drf(y) = 3"), T("drf(x)"), T("a")), F("drf(y) = 3"));
}

TEST(Substitute, AvoidsCapture) {
  Formula r = substitute(F("forall x. x > y"), T("y"), T("x + 1"));
  ASSERT_TRUE(r.is(FormulaKind::Forall));
  EXPECT_NE(r.boundVar(), "x");
  EXPECT_EQ(r.body(), Formula::gt(Term::var(r.boundVar()), T("x + 1")));
}

TEST(Substitute, IdempotentWhenOldGone) {
  Formula once = substitute(F("x > y && drf(x) = 2"), T("x"), T("z + 1"));
  EXPECT_EQ(substitute(once, T("x"), T("z + 1")), once);
}

TEST(Simplify, Constants) {
  EXPECT_TRUE(mkCmp(FormulaKind::Eq, T("3"), T("3")).isTrue());
  EXPECT_TRUE(mkCmp(FormulaKind::Lt, T("x + 1"), T("x")).isFalse());
  EXPECT_TRUE(mkCmp(FormulaKind::Eq, T("e"), T("e")).isTrue());
  EXPECT_EQ(S(mkCmp(FormulaKind::Eq, T("5"), T("m"))), "m = 5");
}

TEST(Simplify, Connectives) {
  EXPECT_EQ(mkAnd(Formula::truth(), F("p > 0")), F("p > 0"));
  EXPECT_TRUE(mkImplies(F("p > 0"), Formula::truth()).isTrue());
  EXPECT_TRUE(mkImplies(F("x != y"), F("x != y")).isTrue());
  EXPECT_TRUE(mkAnd(F("x = 1"), F("x != 1")).isFalse());
  EXPECT_TRUE(mkOr(F("x = 1"), F("x != 1")).isTrue());
  EXPECT_EQ(S(mkNot(F("x > 0 && y = 1"))), "x <= 0 || y != 1");
}

TEST(Simplify, Quantifiers) {
  EXPECT_EQ(mkForall("v", F("x > 0")), F("x > 0"));
  EXPECT_TRUE(mkForall("v", F("v > 0")).isFalse());
  // forall m'. (m = m' => body) collapses to the body at m.
  EXPECT_EQ(S(mkForall("r", F("r = 7 => x > 1"))), "x > 1");
  EXPECT_EQ(S(mkForall("v", F("v > 0 || x > 2"))), "x > 2");
}

TEST(Simplify, DropsUnusedBinderKeepsDrf) {
  Formula f = mkForall("v", F("drf(v) > 0"));
  ASSERT_TRUE(f.is(FormulaKind::Forall));
  EXPECT_TRUE(hasDrf(f));
}

TEST(Nnf, DoubleNegation) {
  Formula f = F("(x > 0 => y = 1) && !(z < 2 || x = z)");
  Formula n = toNnf(f);
  EXPECT_EQ(S(n), "(x <= 0 || y = 1) && z >= 2 && x != z");
}

TEST(Printing, ParsesBack) {
  for (const char* s : {"x + 1 > y * (z - 2)", "!(a > 0 && b < 1) || c = 2", "forall q. drf(q) = x => y > 0",
                        "a - (b - c) = 0 - x", "(a = 0 || b = 1) && c = 2"}) {
    Formula f = F(s);
    EXPECT_EQ(F(S(f).c_str()), f) << s;
  }
}
