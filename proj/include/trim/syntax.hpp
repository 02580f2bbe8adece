#ifndef TRIM_SYNTAX_HPP
#define TRIM_SYNTAX_HPP

#include <optional>
#include <string>
#include <string_view>

#include "trim/ast.hpp"

namespace trim {

/// Parses and validates a program. Deterministic conditionals, compound
/// comparisons, heap reads inside expressions and non-variable call
/// arguments are desugared on the way in. The entry defaults to
/// `defaultEntry`.
Program parseProgram(std::string_view text, const std::string& file = "",
                     const std::optional<std::string>& entry = std::nullopt);

/// Formula syntax: predicates plus `drf(t)`, `=>`, `forall v. f` and
/// `exists v. f`.
Formula parseFormula(std::string_view text);
Term parseTerm(std::string_view text);

std::string print(const Program& p);
std::string print(const Procedure& p);
std::string print(const Stmt& s, int indent = 0);

}  // namespace trim

#endif  // TRIM_SYNTAX_HPP
