#ifndef TRIM_ALIAS_HPP
#define TRIM_ALIAS_HPP

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "trim/ast.hpp"

namespace trim {

/// Abstract heap objects are small integers: one per malloc site plus a
/// single object standing for memory owned by callers of root procedures.
using ObjectSet = std::set<int>;

/// Inclusion-based (Andersen) points-to analysis, flow- and
/// context-insensitive, plus the procedure facts the inference needs:
/// written objects, modLocs and hasAsrts.
class AliasOracle {
 public:
  static AliasOracle build(const Program& p);

  /// Objects a term may evaluate to the address of. nullopt means "any"
  /// (variables in `bound`, unknown names).
  std::optional<ObjectSet> pointsTo(const std::string& proc, const Term& t,
                                    const std::set<std::string>& bound = {}) const;

  bool mayAlias(const std::string& proc, const Term& a, const Term& b,
                const std::set<std::string>& bound = {}) const;

  /// Locations among the variables of `proc` and their first two
  /// dereference levels that may alias `loc`. Always contains `loc`.
  std::set<Term> aliases(const std::string& proc, const Term& loc) const;

  /// Heap locations written by `proc` or its callees, over its formals.
  const std::set<Term>& modLocs(const std::string& proc) const;
  /// True when some write reaches deeper than the locations in modLocs.
  bool modWidened(const std::string& proc) const;
  /// Objects `proc` or its callees may store to.
  const ObjectSet& written(const std::string& proc) const;

  /// Whether the cell at address `loc` (a term of `caller`) may be changed
  /// by a call to `callee`.
  bool mayBeWritten(const std::string& caller, const Term& loc, const std::string& callee,
                    const std::set<std::string>& bound = {}) const;

  bool hasAsrts(const std::string& proc) const;

  const std::vector<std::string>& objectNames() const { return objectNames_; }
  /// `loc -> {locs}` lines: variables, then object contents.
  std::string dump() const;

 private:
  std::map<std::string, ObjectSet> vars_;  // "proc::v"
  std::vector<ObjectSet> contents_;
  std::vector<std::string> objectNames_;
  std::map<std::string, std::vector<std::string>> procVars_;
  std::map<std::string, ObjectSet> written_;
  std::map<std::string, std::set<Term>> modLocs_;
  std::map<std::string, bool> widened_;
  std::map<std::string, bool> hasAsrts_;
};

/// Tarjan SCCs of the call graph, callees before callers; members of an SCC
/// keep declaration order.
std::vector<std::vector<std::string>> callGraphSccs(const Program& p);

/// Procedures reachable from the entry, entry included.
std::set<std::string> reachableProcedures(const Program& p);

}  // namespace trim

#endif  // TRIM_ALIAS_HPP
