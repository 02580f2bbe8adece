#ifndef TRIM_FORMULA_HPP
#define TRIM_FORMULA_HPP

#include <compare>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "trim/term.hpp"

namespace trim {

enum class FormulaKind { True, False, Lt, Gt, Eq, Not, And, Or, Implies, Forall, Exists };

/// Immutable formula. Predicates of the object language are the
/// quantifier-free, `drf`-free, implication-free fragment; safety
/// conditions use the full language.
///
/// The static constructors build nodes verbatim (the parser relies on this
/// for exact round-trips). The free functions `mkAnd`, `mkOr`, ... in this
/// header simplify as they build.
class Formula {
 public:
  Formula() = default;

  static Formula truth();
  static Formula falsity();
  static Formula boolean(bool b) { return b ? truth() : falsity(); }
  static Formula cmp(FormulaKind op, Term lhs, Term rhs);
  static Formula lt(Term lhs, Term rhs) { return cmp(FormulaKind::Lt, std::move(lhs), std::move(rhs)); }
  static Formula gt(Term lhs, Term rhs) { return cmp(FormulaKind::Gt, std::move(lhs), std::move(rhs)); }
  static Formula eq(Term lhs, Term rhs) { return cmp(FormulaKind::Eq, std::move(lhs), std::move(rhs)); }
  static Formula negation(Formula f);
  static Formula conjunction(std::vector<Formula> kids);
  static Formula disjunction(std::vector<Formula> kids);
  static Formula implication(Formula lhs, Formula rhs);
  static Formula forall(std::string var, Formula body);
  static Formula exists(std::string var, Formula body);
  static Formula quantifier(FormulaKind kind, std::string var, Formula body);

  bool valid() const { return node_ != nullptr; }
  FormulaKind kind() const;
  bool is(FormulaKind k) const { return valid() && kind() == k; }
  bool isTrue() const { return is(FormulaKind::True); }
  bool isFalse() const { return is(FormulaKind::False); }
  bool isAtom() const;
  bool isQuantifier() const { return is(FormulaKind::Forall) || is(FormulaKind::Exists); }

  const Term& lhsTerm() const;
  const Term& rhsTerm() const;
  /// Children of Not (one), And/Or (n), Implies (two: premise, conclusion).
  const std::vector<Formula>& kids() const;
  const Formula& kid(std::size_t i = 0) const { return kids()[i]; }
  const std::string& boundVar() const;
  const Formula& body() const { return kid(0); }

  std::size_t size() const;

  friend bool operator==(const Formula& a, const Formula& b);
  friend std::strong_ordering operator<=>(const Formula& a, const Formula& b);

 private:
  struct Node;
  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

std::string toString(const Formula& f);

std::set<std::string> freeVars(const Formula& f);
/// Free and bound names.
std::set<std::string> allNames(const Formula& f);
/// The set of `a` such that `drf(a)` occurs in `f`.
std::set<Term> derefs(const Formula& f);
bool mentions(const Formula& f, const std::string& var);
bool hasQuantifier(const Formula& f);
bool hasDrf(const Formula& f);
bool hasArith(const Formula& f);

/// `_q<N>` with N larger than any `_q` index in `avoid`.
std::string freshName(const std::set<std::string>& avoid, const std::string& prefix = "_q");

/// Capture-avoiding replacement of every occurrence of `from` by `to`.
/// Binders are alpha-renamed when they clash with names in `from` or `to`.
Formula substitute(const Formula& f, const Term& from, const Term& to);
Formula substituteVar(const Formula& f, const std::string& var, const Term& to);

// Simplifying constructors.
Formula mkCmp(FormulaKind op, Term lhs, Term rhs);
Formula mkNot(const Formula& f);
Formula mkAnd(std::vector<Formula> kids);
Formula mkAnd(const Formula& a, const Formula& b);
Formula mkOr(std::vector<Formula> kids);
Formula mkOr(const Formula& a, const Formula& b);
Formula mkImplies(const Formula& a, const Formula& b);
/// Universal quantifier over a fresh binder replacing `var` in `body`.
/// Applies scoping rules and exact linear elimination where possible.
Formula mkForall(const std::string& var, const Formula& body);
/// Existential dual of `mkForall`; applies scoping rules only.
Formula mkExists(const std::string& var, const Formula& body);

/// Rebuild bottom-up through the simplifying constructors.
Formula simplify(const Formula& f);

/// Negation normal form: no implications, negation only on atoms.
Formula toNnf(const Formula& f);

}  // namespace trim

#endif  // TRIM_FORMULA_HPP
