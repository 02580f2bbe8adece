#ifndef TRIM_TESTS_GEN_HPP
#define TRIM_TESTS_GEN_HPP

#include <cstdint>
#include <random>

#include "trim/ast.hpp"
#include "trim/formula.hpp"
#include "trim/interp.hpp"

namespace trim::testgen {

using Rng = std::mt19937_64;

/// TRIM_SEED from the environment, else a fixed default.
std::uint64_t baseSeed();
Rng rngFor(std::uint64_t stream);

// Typed single-frame fragments: scalars a, b and pointers p, q, all defined
// on entry. Pointers only ever hold addresses of allocated cells.

/// Loop-free, call-free block with at most `maxStmts` statements and at most
/// two nondeterministic values (havocs plus allocated cells).
Block randomBlock(Rng& rng, int maxStmts);
/// Quantifier-free post-condition over a, b, p, q, drf(p), drf(q).
Formula randomPost(Rng& rng);
/// a, b over [lo, hi], p, q over {1, 2}, two heap cells over [lo, hi].
InputSpace blockInputs(Int lo, Int hi);
/// blockInputs with every variable that neither `b` nor `post` mentions fixed
/// to one value (and the heap fixed when nothing dereferences). Results over
/// the full space are the same by construction.
InputSpace blockInputsFor(const Block& b, const Formula& post, Int lo, Int hi);

/// main(a, b, p, q) plus up to two helpers f1, f2 with signature (n, x, s).
/// Helpers recurse only under `n > 0` with a decremented fuel argument, so
/// every run terminates. At most 12 statements per procedure. Drafts whose
/// split form (see splitProcedures) needs more than kCorpusPathBudget runs
/// from any of a spread of 14 inputs are discarded.
inline constexpr std::size_t kCorpusPathBudget = 2000;
Program randomProgram(Rng& rng);
/// Inputs for randomProgram: a, b over [-1, 1], p, q over {1, 2}, two cells over {0, 1}.
/// Nondeterministic values range over [-1, 1].
InputSpace programInputs();
ExecConfig programExecConfig();

struct QeSample {
  Formula formula;
  bool unitLinear = true;  // every atom is linear with coefficients in {-1, 0, 1}
};
/// NNF formula over free x, y, z with nested quantifiers binding u, w.
QeSample randomQeFormula(Rng& rng, bool existentialOnly);

/// Flips the predicate of the `index`-th assert (in program order). Returns
/// false when there are fewer asserts.
bool negateAssert(Program& p, std::size_t index);
/// The assert negateAssert(p, index) would flip, or null.
const Stmt* assertAt(const Program& p, std::size_t index);
std::size_t countAsserts(const Program& p);

}  // namespace trim::testgen

#endif  // TRIM_TESTS_GEN_HPP
