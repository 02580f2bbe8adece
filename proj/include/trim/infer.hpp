#ifndef TRIM_INFER_HPP
#define TRIM_INFER_HPP

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "trim/alias.hpp"
#include "trim/arith.hpp"
#include "trim/ast.hpp"

namespace trim {

/// Procedure summaries in the order they were computed.
class SummaryEnv {
 public:
  const Formula* find(const std::string& proc) const;
  void set(const std::string& proc, Formula f);
  const std::vector<std::pair<std::string, Formula>>& entries() const { return entries_; }

 private:
  std::vector<std::pair<std::string, Formula>> entries_;
};

/// Position of a statement: indices through nested blocks. A NondetIf at
/// index i is entered with (i, 0, j) for its then-branch and (i, 1, j) for
/// its else-branch. An index equal to the block size is the block's end.
using StmtPath = std::vector<int>;

struct AnnotatedProgram {
  Program program;
  /// Safety condition holding before each position.
  std::map<std::string, std::map<StmtPath, Formula>> conditions;

  const Formula* at(const std::string& proc, const StmtPath& path) const;
};

const Stmt* statementAt(const Procedure& proc, const StmtPath& path);

struct InferenceOptions {
  IntMode intMode = IntMode::Math;
};

/// Def. store: `target` is drf(a); substitutes `value` for it and adds
/// a != b for every remaining drf(b) whose address may alias.
Formula store(const std::string& proc, const Term& target, const Term& value,
              const AliasOracle& oracle, const Formula& phi);

/// Folds store with fresh universally quantified values over `locs`
/// (drf terms); scalar variables are simply quantified.
Formula havoc(const std::string& proc, const std::vector<Term>& locs, const AliasOracle& oracle,
              const Formula& phi);

/// Replaces every heap read in `phi` that a call to `callee` may change by a
/// fresh universally quantified value.
Formula havocCall(const std::string& proc, const std::string& callee, const AliasOracle& oracle,
                  const Formula& phi);

/// Stored summary over the actuals; otherwise false if the callee may fail
/// and true if it cannot.
Formula summary(const Program& program, const std::string& callee, const SummaryEnv& env,
                const AliasOracle& oracle, const std::vector<std::string>& actuals);

/// In-range side conditions for every arithmetic sub-term (wrap32 mode).
Formula rangeConditions(const Term& t);
Formula rangeConditions(const Formula& f);

Formula inferStatement(const Program& program, const std::string& proc, const AliasOracle& oracle,
                       const SummaryEnv& env, const Formula& phi, const Stmt& s,
                       const InferenceOptions& opts = {});

/// Safety condition before `body` given `post` after it.
Formula inferBlock(const Program& program, const std::string& proc, const AliasOracle& oracle,
                   const SummaryEnv& env, const Formula& post, const Block& body,
                   const InferenceOptions& opts = {});

struct InferenceResult {
  AnnotatedProgram annotated;
  SummaryEnv summaries;
};

InferenceResult inferProgram(const Program& program, const AliasOracle& oracle,
                             const InferenceOptions& opts = {});

/// `proc:line: formula` for every annotated statement with a known line.
std::string dumpConditions(const AnnotatedProgram& annotated);

}  // namespace trim

#endif  // TRIM_INFER_HPP
