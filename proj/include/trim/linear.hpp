#ifndef TRIM_LINEAR_HPP
#define TRIM_LINEAR_HPP

#include <map>
#include <optional>

#include "trim/term.hpp"

namespace trim {

/// Linear combination `sum(coeff * atom) + constant`. Atoms are variables and
/// any sub-term that is not linear (drf terms, products of non-constants).
class LinearForm {
 public:
  LinearForm() = default;
  explicit LinearForm(Int constant) : constant_(constant) {}

  /// Linearizes a term; nullopt if a coefficient overflows.
  static std::optional<LinearForm> of(const Term& t);

  Int constant() const { return constant_; }
  const std::map<Term, Int>& coeffs() const { return coeffs_; }
  Int coeff(const Term& atom) const;
  bool isConstant() const { return coeffs_.empty(); }

  std::optional<LinearForm> plus(const LinearForm& other) const;
  std::optional<LinearForm> scaled(Int factor) const;
  std::optional<LinearForm> minus(const LinearForm& other) const;
  LinearForm without(const Term& atom) const;

  /// Canonical term: positive atoms first (in term order), then negative
  /// ones, then the constant.
  Term toTerm() const;

 private:
  std::map<Term, Int> coeffs_;
  Int constant_ = 0;
};

}  // namespace trim

#endif  // TRIM_LINEAR_HPP
