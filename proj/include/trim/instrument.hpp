#ifndef TRIM_INSTRUMENT_HPP
#define TRIM_INSTRUMENT_HPP

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "trim/arith.hpp"
#include "trim/ast.hpp"
#include "trim/formula_engine.hpp"
#include "trim/infer.hpp"

namespace trim {

/// Where trimming conditions go. Loops are tail-recursive calls here, so
/// "before loops" is covered by `beforeCalls`.
struct PlacementStrategy {
  bool atEntry = true;
  bool beforeCalls = true;
  bool beforeConditionals = true;

  bool any() const { return atEntry || beforeCalls || beforeConditionals; }
};

enum class QeMode { Full, Nondet };

struct TrimConfig {
  std::optional<std::size_t> maxConjuncts;  // unbounded when empty
  QeMode qe = QeMode::Full;
  PlacementStrategy placement;
  IntMode intMode = IntMode::Math;
  bool keepTrivial = true;
  std::size_t dnfCap = kDefaultDnfCap;
};

inline constexpr const char* kSafeSuffix = "__safe";

struct SplitProgram {
  Program program;
  /// original name -> never-failing clone
  std::map<std::string, std::string> cloneOf;
  /// Unprimed procedures reachable from the entry; only these are instrumented.
  std::set<std::string> instrumentable;
};

/// Clones every reachable, called procedure into a variant whose asserts are
/// assumes and whose calls go to clones; rewrites each call site in the
/// unprimed procedures into `if (*) { v := call f__safe(..); } else
/// { v := call f(..); assume false; }`. Clones precede their originals.
SplitProgram splitProcedures(const Program& p);

/// True for the call-site conditionals produced by splitProcedures.
bool isSplitCallSite(const Stmt& s, const std::map<std::string, std::string>& cloneOf);

/// The condition emitted for a safety condition, before temporaries are
/// introduced. `closed` is `exists nondetVars. predicate` with drf terms.
struct EmittedCondition {
  std::vector<std::string> nondetVars;
  Formula predicate;
  bool omitted = false;  // predicate is true

  Formula closed() const;
};

EmittedCondition trimmingCondition(const Formula& safety, const TrimConfig& cfg);

enum class EmitMode {
  Assume,  // the trimmed program
  Probe,   // harness: record whether the condition holds, never prune
};

struct InsertedAssume {
  std::string proc;
  StmtPath path;  // position in the split (uninstrumented) body
  SourceSpan span;
  Formula safety;
  EmittedCondition condition;
  int probeId = -1;

  bool trivial() const { return condition.predicate.isFalse(); }
};

struct InstrumentResult {
  Program program;
  std::vector<InsertedAssume> inserted;
};

InstrumentResult instrument(const SplitProgram& split, const AnnotatedProgram& annotated,
                            const TrimConfig& cfg, EmitMode mode = EmitMode::Assume);

/// Insertion points chosen by the strategy in one procedure body.
std::vector<StmtPath> placementPoints(const Procedure& proc, const PlacementStrategy& strategy,
                                      const std::map<std::string, std::string>& cloneOf);

}  // namespace trim

#endif  // TRIM_INSTRUMENT_HPP
