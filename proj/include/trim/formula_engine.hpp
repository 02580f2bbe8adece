#ifndef TRIM_FORMULA_ENGINE_HPP
#define TRIM_FORMULA_ENGINE_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "trim/formula.hpp"

namespace trim {

inline constexpr std::size_t kDefaultDnfCap = 64;

/// A condition ready to be emitted as `v := nondet(); ... assume predicate;`.
/// `nondetVars` is empty when the predicate is quantifier-free on its own.
struct TrimmingCondition {
  std::vector<std::string> nondetVars;
  Formula predicate;

  bool isPure() const { return nondetVars.empty(); }
};

/// Negation of a safety condition, in negation normal form.
Formula negateToTrim(const Formula& safety);

struct ExistsElimination {
  Formula formula;
  bool exact = true;        // logically equivalent to the input
  bool capExceeded = false;  // DNF too large; `formula` is meaningless
};

/// Eliminates `var` from `exists var. body` for a quantifier-free NNF body.
/// The result is implied by the input; it is equivalent when `exact`.
ExistsElimination eliminateExists(const std::string& var, const Formula& body,
                                  std::size_t dnfCap = kDefaultDnfCap);

/// Only succeeds when the elimination is exact.
std::optional<Formula> eliminateExistsExact(const std::string& var, const Formula& body,
                                            std::size_t dnfCap = kDefaultDnfCap);

/// Removes existentials from an NNF formula innermost-first. Quantifiers
/// whose elimination would exceed the DNF cap survive as nondet variables.
/// The returned condition is implied by the input.
TrimmingCondition eliminateQuantifiers(const Formula& f, std::size_t dnfCap = kDefaultDnfCap);

/// Strips every quantifier, recording the binders as nondet variables.
/// Binders are standardized apart first.
TrimmingCondition nondetEncode(const Formula& f);

/// Keeps at most `k` conjuncts in every conjunction of an NNF predicate,
/// in order of appearance. The result is implied by the input.
Formula boundConjuncts(const Formula& f, std::size_t k);

}  // namespace trim

#endif  // TRIM_FORMULA_ENGINE_HPP
