#include "trim/instrument.hpp"

#include <algorithm>
#include <charconv>

namespace trim {

namespace {

Block cloneBlock(const Block& b, const std::map<std::string, std::string>& cloneOf) {
  Block out;
  for (const auto& s : b) {
    Stmt c = s;
    if (c.kind == StmtKind::Assert) {
      c.kind = StmtKind::Assume;
    } else if (c.kind == StmtKind::Call) {
      c.callee = cloneOf.at(c.callee);
    } else if (c.kind == StmtKind::NondetIf) {
      c.thenBranch = cloneBlock(s.thenBranch, cloneOf);
      c.elseBranch = cloneBlock(s.elseBranch, cloneOf);
    }
    out.push_back(std::move(c));
  }
  return out;
}

Block splitCalls(const Block& b, const std::map<std::string, std::string>& cloneOf) {
  Block out;
  for (const auto& s : b) {
    if (s.kind == StmtKind::Call) {
      Stmt safe = Stmt::call(s.target, cloneOf.at(s.callee), s.args).withSpan(s.span);
      Stmt fail = Stmt::assumption(Formula::falsity()).withSpan(s.span);
      out.push_back(Stmt::nondetIf({safe}, {s, fail}).withSpan(s.span));
    } else if (s.kind == StmtKind::NondetIf) {
      Stmt c = s;
      c.thenBranch = splitCalls(s.thenBranch, cloneOf);
      c.elseBranch = splitCalls(s.elseBranch, cloneOf);
      out.push_back(std::move(c));
    } else {
      out.push_back(s);
    }
  }
  return out;
}

bool containsAssert(const Block& b) {
  for (const auto& s : b)
    if (s.kind == StmtKind::Assert || containsAssert(s.thenBranch) || containsAssert(s.elseBranch))
      return true;
  return false;
}

void collectNames(const Block& b, std::set<std::string>& out) {
  for (const auto& s : b) {
    for (const auto& v : readsOf(s)) out.insert(v);
    if (!s.target.empty()) out.insert(s.target);
    collectNames(s.thenBranch, out);
    collectNames(s.elseBranch, out);
  }
}

// Fresh `<prefix>N` names above every index already used in a procedure.
class NameSupply {
 public:
  explicit NameSupply(const Procedure& proc) {
    used_.insert(proc.params.begin(), proc.params.end());
    used_.insert(proc.ret);
    collectNames(proc.body, used_);
  }

  std::string fresh(const std::string& prefix) {
    long& next = next_[prefix];
    if (next == 0) {
      next = 1;
      for (const auto& n : used_) {
        if (n.size() <= prefix.size() || n.compare(0, prefix.size(), prefix) != 0) continue;
        long idx = 0;
        auto [p, ec] = std::from_chars(n.data() + prefix.size(), n.data() + n.size(), idx);
        if (ec == std::errc() && p == n.data() + n.size()) next = std::max(next, idx + 1);
      }
    }
    std::string name;
    do name = prefix + std::to_string(next++);
    while (used_.count(name));
    used_.insert(name);
    return name;
  }

 private:
  std::set<std::string> used_;
  std::map<std::string, long> next_;
};

// A heap read the emitted code can perform: a chain of loads from a program
// variable.
bool loadable(const Term& loc, const std::set<std::string>& nondets) {
  if (loc.isVar()) return !nondets.count(loc.name());
  return loc.isDrf() && loadable(loc.operand(), nondets);
}

bool keepLiteral(const Formula& lit, const TrimConfig& cfg, const std::set<std::string>& nondets) {
  if (cfg.intMode == IntMode::Wrap32 && hasArith(lit)) return false;
  for (const auto& a : derefs(lit))
    if (!loadable(a, nondets)) return false;
  return true;
}

// Replaces unusable literals of an NNF formula by true.
Formula weaken(const Formula& f, const TrimConfig& cfg, const std::set<std::string>& nondets) {
  switch (f.kind()) {
    case FormulaKind::True:
    case FormulaKind::False:
      return f;
    case FormulaKind::And:
    case FormulaKind::Or: {
      std::vector<Formula> kids;
      for (const auto& k : f.kids()) kids.push_back(weaken(k, cfg, nondets));
      return f.is(FormulaKind::And) ? mkAnd(std::move(kids)) : mkOr(std::move(kids));
    }
    default:
      return keepLiteral(f, cfg, nondets) ? f : Formula::truth();
  }
}

Block emit(const EmittedCondition& c, NameSupply& names) {
  Block out;
  Formula pred = c.predicate;
  // Two passes: a witness may already be named like a fresh `_q`.
  for (std::size_t i = 0; i < c.nondetVars.size(); ++i)
    pred = substituteVar(pred, c.nondetVars[i], Term::var("#" + std::to_string(i)));
  for (std::size_t i = 0; i < c.nondetVars.size(); ++i) {
    std::string fresh = names.fresh("_q");
    pred = substituteVar(pred, "#" + std::to_string(i), Term::var(fresh));
    out.push_back(Stmt::havoc(fresh));
  }
  // Innermost reads first so each load goes through a variable.
  for (;;) {
    std::set<Term> locs = derefs(pred);
    auto it = std::find_if(locs.begin(), locs.end(), [](const Term& t) { return t.isVar(); });
    if (it == locs.end()) break;
    std::string t = names.fresh("_t");
    out.push_back(Stmt::load(t, it->name()));
    pred = substitute(pred, Term::drf(*it), Term::var(t));
  }
  out.push_back(Stmt::assumption(pred));
  return out;
}

void collectPoints(const Block& b, StmtPath prefix, const PlacementStrategy& strategy,
                   const std::map<std::string, std::string>& cloneOf, std::set<StmtPath>& out) {
  for (std::size_t i = 0; i < b.size(); ++i) {
    const Stmt& s = b[i];
    if (s.kind != StmtKind::NondetIf) continue;
    StmtPath here = prefix;
    here.push_back(static_cast<int>(i));
    bool callSite = isSplitCallSite(s, cloneOf);
    if (callSite ? strategy.beforeCalls : strategy.beforeConditionals) out.insert(here);
    for (int branch = 0; branch < 2; ++branch) {
      StmtPath inner = here;
      inner.push_back(branch);
      collectPoints(branch == 0 ? s.thenBranch : s.elseBranch, inner, strategy, cloneOf, out);
    }
  }
}

Block rebuild(const Block& b, StmtPath prefix, const std::map<StmtPath, Block>& inserts) {
  Block out;
  prefix.push_back(0);
  for (std::size_t i = 0; i <= b.size(); ++i) {
    prefix.back() = static_cast<int>(i);
    if (auto it = inserts.find(prefix); it != inserts.end())
      out.insert(out.end(), it->second.begin(), it->second.end());
    if (i == b.size()) break;
    Stmt s = b[i];
    if (s.kind == StmtKind::NondetIf) {
      StmtPath thenPath = prefix, elsePath = prefix;
      thenPath.push_back(0);
      elsePath.push_back(1);
      s.thenBranch = rebuild(b[i].thenBranch, thenPath, inserts);
      s.elseBranch = rebuild(b[i].elseBranch, elsePath, inserts);
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

SplitProgram splitProcedures(const Program& p) {
  SplitProgram out;
  std::set<std::string> reach = reachableProcedures(p);
  std::set<std::string> called;
  for (const auto& name : reach) {
    std::vector<std::string> cs;
    collectCallees(p.find(name)->body, cs);
    called.insert(cs.begin(), cs.end());
  }
  std::set<std::string> names;
  for (const auto& proc : p.procedures) names.insert(proc.name);
  for (const auto& proc : p.procedures) {
    if (!reach.count(proc.name) || !called.count(proc.name)) continue;
    std::string clone = proc.name + kSafeSuffix;
    while (names.count(clone)) clone += kSafeSuffix;
    names.insert(clone);
    out.cloneOf[proc.name] = clone;
  }

  out.program.entry = p.entry;
  for (const auto& proc : p.procedures) {
    if (!reach.count(proc.name)) {
      out.program.procedures.push_back(proc);
      continue;
    }
    if (auto it = out.cloneOf.find(proc.name); it != out.cloneOf.end()) {
      Procedure c = proc;
      c.name = it->second;
      c.body = cloneBlock(proc.body, out.cloneOf);
      out.program.procedures.push_back(std::move(c));
    }
    Procedure orig = proc;
    orig.body = splitCalls(proc.body, out.cloneOf);
    out.program.procedures.push_back(std::move(orig));
    out.instrumentable.insert(proc.name);
  }
  return out;
}

bool isSplitCallSite(const Stmt& s, const std::map<std::string, std::string>& cloneOf) {
  if (s.kind != StmtKind::NondetIf || s.thenBranch.size() != 1 || s.elseBranch.size() != 2) return false;
  const Stmt& safe = s.thenBranch[0];
  const Stmt& orig = s.elseBranch[0];
  const Stmt& stop = s.elseBranch[1];
  if (safe.kind != StmtKind::Call || orig.kind != StmtKind::Call) return false;
  if (stop.kind != StmtKind::Assume || !stop.pred.isFalse()) return false;
  auto it = cloneOf.find(orig.callee);
  return it != cloneOf.end() && it->second == safe.callee && safe.args == orig.args &&
         safe.target == orig.target;
}

Formula EmittedCondition::closed() const {
  Formula f = predicate;
  for (auto it = nondetVars.rbegin(); it != nondetVars.rend(); ++it) f = Formula::exists(*it, f);
  return f;
}

EmittedCondition trimmingCondition(const Formula& safety, const TrimConfig& cfg) {
  Formula negated = negateToTrim(safety);
  TrimmingCondition tc =
      cfg.qe == QeMode::Full ? eliminateQuantifiers(negated, cfg.dnfCap) : nondetEncode(negated);
  Formula pred = simplify(tc.predicate);
  if (cfg.maxConjuncts) pred = boundConjuncts(pred, *cfg.maxConjuncts);
  std::set<std::string> nondets(tc.nondetVars.begin(), tc.nondetVars.end());
  pred = simplify(weaken(pred, cfg, nondets));

  EmittedCondition out;
  out.predicate = pred;
  for (const auto& v : tc.nondetVars)
    if (mentions(pred, v)) out.nondetVars.push_back(v);
  out.omitted = pred.isTrue();
  return out;
}

std::vector<StmtPath> placementPoints(const Procedure& proc, const PlacementStrategy& strategy,
                                      const std::map<std::string, std::string>& cloneOf) {
  std::set<StmtPath> points;
  if (strategy.atEntry) {
    int k = 0;
    while (static_cast<std::size_t>(k) < proc.body.size() &&
           proc.body[static_cast<std::size_t>(k)].kind == StmtKind::Assume)
      ++k;
    points.insert({k});
  }
  collectPoints(proc.body, {}, strategy, cloneOf, points);
  return {points.begin(), points.end()};
}

InstrumentResult instrument(const SplitProgram& split, const AnnotatedProgram& annotated,
                            const TrimConfig& cfg, EmitMode mode) {
  InstrumentResult out;
  out.program = split.program;
  bool assertionFree = std::none_of(split.program.procedures.begin(), split.program.procedures.end(),
                                    [](const Procedure& p) { return containsAssert(p.body); });
  int nextProbe = 0;
  for (auto& proc : out.program.procedures) {
    if (!split.instrumentable.count(proc.name)) continue;
    NameSupply names(proc);
    std::map<StmtPath, Block> inserts;
    std::vector<StmtPath> points = placementPoints(proc, cfg.placement, split.cloneOf);
    for (std::size_t i = 0; i < points.size(); ++i) {
      const StmtPath& path = points[i];
      const Formula* phi = annotated.at(proc.name, path);
      if (!phi) continue;
      EmittedCondition cond = trimmingCondition(*phi, cfg);
      if (cond.omitted) continue;
      bool entryPoint = cfg.placement.atEntry && i == 0 && path.size() == 1;
      if (!cfg.keepTrivial && assertionFree && entryPoint && proc.name == split.program.entry &&
          cond.predicate.isFalse())
        continue;

      InsertedAssume rec;
      rec.proc = proc.name;
      rec.path = path;
      const Stmt* at = statementAt(proc, path);
      rec.span = at ? at->span : proc.span;
      rec.safety = *phi;
      rec.condition = cond;
      if (mode == EmitMode::Probe) {
        rec.probeId = nextProbe++;
        inserts[path] = {Stmt::probe(rec.probeId, cond.closed()).withSpan(rec.span)};
      } else {
        Block code = emit(cond, names);
        for (auto& s : code) s.span = rec.span;
        inserts[path] = std::move(code);
      }
      out.inserted.push_back(std::move(rec));
    }
    proc.body = rebuild(proc.body, {}, inserts);
  }
  return out;
}

}  // namespace trim
