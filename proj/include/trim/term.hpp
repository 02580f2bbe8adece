#ifndef TRIM_TERM_HPP
#define TRIM_TERM_HPP

#include <compare>
#include <cstdint>
#include <memory>
#include <set>
#include <string>

namespace trim {

using Int = std::int64_t;

// Order matters: it is the canonical ordering used when sorting terms
// (variables first, constants last, so `m = 5` rather than `5 = m`).
enum class TermKind { Var, Drf, Add, Sub, Mul, Const };

/// Immutable term over program variables, integer constants, the arithmetic
/// operators of the object language and the uninterpreted dereference
/// function `drf`. Program expressions are terms without `drf`.
class Term {
 public:
  Term() = default;

  static Term var(std::string name);
  static Term constant(Int value);
  static Term add(Term lhs, Term rhs);
  static Term sub(Term lhs, Term rhs);
  static Term mul(Term lhs, Term rhs);
  static Term drf(Term location);
  static Term binary(TermKind kind, Term lhs, Term rhs);

  bool valid() const { return node_ != nullptr; }
  TermKind kind() const;
  const std::string& name() const;
  Int value() const;
  const Term& lhs() const;
  const Term& rhs() const;
  /// Argument of a `drf` term.
  const Term& operand() const { return lhs(); }

  bool isVar() const { return valid() && kind() == TermKind::Var; }
  bool isConst() const { return valid() && kind() == TermKind::Const; }
  bool isDrf() const { return valid() && kind() == TermKind::Drf; }
  bool isArith() const;

  /// Node count.
  std::size_t size() const;

  friend bool operator==(const Term& a, const Term& b);
  friend std::strong_ordering operator<=>(const Term& a, const Term& b);

 private:
  struct Node;
  explicit Term(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

std::string toString(const Term& t);

void collectVars(const Term& t, std::set<std::string>& out);
std::set<std::string> freeVars(const Term& t);
bool mentions(const Term& t, const std::string& var);
bool contains(const Term& haystack, const Term& needle);

/// Every `a` such that `drf(a)` is a sub-term of `t` (nested levels included).
void collectDerefs(const Term& t, std::set<Term>& out);

/// Replace every sub-term structurally equal to `from` by `to`.
Term substitute(const Term& t, const Term& from, const Term& to);

/// Constant folding and unit laws (x + 0, x * 1, x * 0, x - x).
Term simplify(const Term& t);

}  // namespace trim

#endif  // TRIM_TERM_HPP
