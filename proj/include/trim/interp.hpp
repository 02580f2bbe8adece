#ifndef TRIM_INTERP_HPP
#define TRIM_INTERP_HPP

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "trim/arith.hpp"
#include "trim/ast.hpp"
#include "trim/formula.hpp"

namespace trim {

struct ExecConfig {
  Int nondetLo = -3;
  Int nondetHi = 3;
  /// Values for havocs of `_q` witnesses inserted by the instrumenter, and
  /// for the existential witnesses of probe predicates.
  Int witnessLo = -8;
  Int witnessHi = 16;
  std::size_t forkBound = 64;
  std::size_t stepBound = 100000;
  /// explore gives up (Inconclusive) after this many runs from one valuation.
  std::size_t pathBound = 200000;
  IntMode intMode = IntMode::Math;
  /// A run of `_q` havocs directly followed by an assume takes no decisions:
  /// the witnesses get the first tuple satisfying the assume (lowest values
  /// if none does). Such witnesses are only read by that assume, so this
  /// merges runs that differ in dead values and keeps every outcome.
  bool angelicWitnesses = true;

  void validate() const;
};

/// Scalars by name plus the heap. Address 0 is null; valid addresses are the
/// keys of `heap`.
struct Valuation {
  std::map<std::string, Int> vars;
  std::map<Int, Int> heap;

  friend bool operator==(const Valuation&, const Valuation&) = default;
};

std::string toString(const Valuation& v);

enum class Outcome {
  Ok,          // terminated normally
  AssumeFail,  // blocked by an assumption
  AssertFail,  // assertion violation or invalid dereference
};

const char* toString(Outcome o);

struct ProbeHit {
  int id = -1;
  bool holds = false;
};

struct ExecutionResult {
  std::optional<Outcome> outcome;  // empty when inconclusive
  std::string inconclusive;        // reason when `outcome` is empty
  Valuation entry;
  /// Frame of the entry procedure (or block) and the heap at termination.
  Valuation final;
  std::optional<Int> ret;
  std::vector<Int> decisions;
  std::size_t steps = 0;
  std::vector<ProbeHit> probes;

  bool conclusive() const { return outcome.has_value(); }
  bool failed() const { return outcome == Outcome::AssertFail; }
};

struct StepEvent {
  const std::string& proc;
  const Stmt& stmt;
  const std::map<std::string, Int>& frame;
  const std::map<Int, Int>& heap;
};
using StepObserver = std::function<void(const StepEvent&)>;

/// Runs the entry procedure. σ must bind every entry parameter. Throws
/// std::invalid_argument on a missing parameter or a decision outside the
/// domain of its choice point. Running out of decisions is Inconclusive.
ExecutionResult run(const Program& p, const Valuation& sigma, const std::vector<Int>& decisions,
                    const ExecConfig& cfg = {}, const StepObserver* observer = nullptr);

struct Exploration {
  std::vector<ExecutionResult> results;  // conclusive ones only
  std::size_t inconclusive = 0;

  bool anyFailure() const;
  std::size_t count(Outcome o) const;
};

/// Every decision sequence within the bounds, depth first.
Exploration explore(const Program& p, const Valuation& sigma, const ExecConfig& cfg = {},
                    const StepObserver* observer = nullptr);

/// Explores a call-free block in a single frame named "block".
Exploration exploreBlock(const Block& body, const Valuation& sigma, const ExecConfig& cfg = {});

/// Truth value of `f` with `frame` and `heap`. Quantifiers range over
/// [qlo, qhi]. Dereferencing an invalid address reads 0. Empty on overflow or
/// an unbound variable.
std::optional<bool> evaluate(const Formula& f, const std::map<std::string, Int>& frame,
                             const std::map<Int, Int>& heap, Int qlo, Int qhi,
                             IntMode mode = IntMode::Math);
std::optional<Int> evaluate(const Term& t, const std::map<std::string, Int>& frame,
                            const std::map<Int, Int>& heap, IntMode mode = IntMode::Math);

/// Whether every execution of `s` from σ avoids assertion failure and every
/// normally terminating one ends in a state satisfying `post` (quantifiers
/// over the nondet domain). Empty when exploration was cut short.
std::optional<bool> exactWp(const Block& s, const Formula& post, const Valuation& sigma,
                            const ExecConfig& cfg = {});

/// Cartesian product of per-variable value lists and heap cells 1..heapCells.
struct InputSpace {
  std::vector<std::pair<std::string, std::vector<Int>>> vars;
  std::size_t heapCells = 0;
  std::vector<Int> cellValues;

  static std::vector<Int> range(Int lo, Int hi);
  std::vector<Valuation> enumerate() const;
};

/// Every parameter of the entry over [lo, hi], no heap.
InputSpace scalarInputs(const Program& p, Int lo, Int hi);

struct Counterexample {
  Valuation sigma;
  std::string reason;
  std::vector<Int> decisions;
};

struct EquiSafeVerdict {
  enum class Kind { EquiSafe, Counterexample, Inconclusive };
  Kind kind = Kind::EquiSafe;
  std::optional<Counterexample> counterexample;
  std::size_t checked = 0;       // valuations compared
  std::size_t inconclusive = 0;  // valuations skipped because a bound was hit

  std::string text() const;
};

/// Both programs are explored from every valuation of `inputs`. Fails when
/// failure existence differs, when a normal termination of `p` has neither a
/// normal termination with the same return value nor a blocked run in `q`,
/// or when `p` can block and `q` cannot.
EquiSafeVerdict checkEquiSafe(const Program& p, const Program& q,
                              const std::vector<Valuation>& inputs, const ExecConfig& cfg = {});

}  // namespace trim

#endif  // TRIM_INTERP_HPP
