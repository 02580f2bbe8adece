#include <gtest/gtest.h>

#include "trim/formula_engine.hpp"
#include "trim/syntax.hpp"

using namespace trim;

namespace {

Formula F(const char* s) { return parseFormula(s); }
std::string S(const Formula& f) { return toString(f); }

}  // namespace

TEST(NegateToTrim, Examples) {
  EXPECT_EQ(S(negateToTrim(F("m != 123"))), "m = 123");
  EXPECT_TRUE(negateToTrim(F("true")).isFalse());
  EXPECT_EQ(S(negateToTrim(F("n = 0"))), "n != 0");
}

TEST(NegateToTrim, ForallBecomesExists) {
  Formula r = negateToTrim(Formula::forall("v", F("drf(v) > x")));
  ASSERT_TRUE(r.is(FormulaKind::Exists));
  EXPECT_EQ(S(r.body()), "drf(v) <= x");
}

TEST(EliminateQuantifiers, Examples) {
  auto a = eliminateQuantifiers(F("exists x. x = 1 && x != 1"));
  EXPECT_TRUE(a.isPure());
  EXPECT_TRUE(a.predicate.isFalse());

  auto b = eliminateQuantifiers(F("exists x. y > x"));
  EXPECT_TRUE(b.predicate.isTrue());

  auto c = eliminateQuantifiers(F("exists x. x > 0 && x < 2 && y = x"));
  EXPECT_EQ(S(c.predicate), "y > 0 && y < 2");
}

TEST(EliminateQuantifiers, TestPointsWithDisequalities) {
  // x in (a, b) and x != c: exact via lower-bound test points.
  auto r = eliminateExists("x", F("x > a && x < b && x != c"));
  EXPECT_TRUE(r.exact);
  EXPECT_FALSE(r.capExceeded);
  EXPECT_FALSE(hasQuantifier(r.formula));
  EXPECT_FALSE(mentions(r.formula, "x"));
}

TEST(EliminateQuantifiers, DrfOfBoundVariableWeakens) {
  auto r = eliminateExists("q", F("drf(q) = 3 && q > y"));
  EXPECT_FALSE(r.exact);
  EXPECT_TRUE(r.formula.isTrue());
}

TEST(EliminateQuantifiers, CapFallsBackToNondet) {
  // (a1 || b1) && ... && (a7 || b7) has 2^7 disjuncts.
  std::string text = "exists x. ";
  for (int i = 0; i < 7; ++i) {
    if (i) text += " && ";
    text += "(x > a" + std::to_string(i) + " || x < b" + std::to_string(i) + ")";
  }
  auto r = eliminateQuantifiers(F(text.c_str()));
  EXPECT_EQ(r.nondetVars, std::vector<std::string>{"x"});
}

TEST(NondetEncode, Examples) {
  auto a = nondetEncode(F("exists x. x = 1 && x != 1"));
  EXPECT_EQ(a.nondetVars, std::vector<std::string>{"x"});
  EXPECT_EQ(S(a.predicate), "x = 1 && x != 1");

  auto b = nondetEncode(F("y > 0"));
  EXPECT_TRUE(b.isPure());
  EXPECT_EQ(S(b.predicate), "y > 0");

  auto c = nondetEncode(F("exists a. exists b. a < b && y = a + b"));
  EXPECT_EQ(c.nondetVars, (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(S(c.predicate), "a < b && y = a + b");
}

TEST(NondetEncode, StandardizesApart) {
  auto r = nondetEncode(F("(exists v. v > x) || (exists v. v < y) || v = 2"));
  ASSERT_EQ(r.nondetVars.size(), 2u);
  EXPECT_NE(r.nondetVars[0], r.nondetVars[1]);
  EXPECT_NE(r.nondetVars[0], "v");
  EXPECT_NE(r.nondetVars[1], "v");
}

TEST(BoundConjuncts, Examples) {
  EXPECT_EQ(S(boundConjuncts(F("a = 1 && b = 1 && c = 1 && d = 1 && e = 1"), 4)),
            "a = 1 && b = 1 && c = 1 && d = 1");
  Formula small = F("a = 1 && (b = 1 || c = 1)");
  EXPECT_EQ(boundConjuncts(small, 4), small);
  EXPECT_EQ(S(boundConjuncts(F("(a = 1 && b = 2) || c = 3"), 1)), "a = 1 || c = 3");
}
