#include "trim/infer.hpp"

#include <algorithm>
#include <functional>

namespace trim {

const Formula* SummaryEnv::find(const std::string& proc) const {
  for (const auto& [name, f] : entries_)
    if (name == proc) return &f;
  return nullptr;
}

void SummaryEnv::set(const std::string& proc, Formula f) {
  for (auto& [name, g] : entries_) {
    if (name == proc) {
      g = std::move(f);
      return;
    }
  }
  entries_.emplace_back(proc, std::move(f));
}

const Formula* AnnotatedProgram::at(const std::string& proc, const StmtPath& path) const {
  auto p = conditions.find(proc);
  if (p == conditions.end()) return nullptr;
  auto it = p->second.find(path);
  return it == p->second.end() ? nullptr : &it->second;
}

const Stmt* statementAt(const Procedure& proc, const StmtPath& path) {
  const Block* block = &proc.body;
  for (std::size_t i = 0; i < path.size(); i += 2) {
    if (path[i] < 0 || static_cast<std::size_t>(path[i]) >= block->size()) return nullptr;
    const Stmt& s = (*block)[static_cast<std::size_t>(path[i])];
    if (i + 1 == path.size()) return &s;
    if (s.kind != StmtKind::NondetIf) return nullptr;
    block = path[i + 1] == 0 ? &s.thenBranch : &s.elseBranch;
  }
  return nullptr;
}

namespace {

bool mentionsAny(const Term& t, const std::set<std::string>& vars) {
  return std::any_of(vars.begin(), vars.end(), [&t](const std::string& v) { return mentions(t, v); });
}

void freeDrfTerms(const Term& t, const std::set<std::string>& localBound, std::set<Term>& out) {
  switch (t.kind()) {
    case TermKind::Drf:
      if (!mentionsAny(t, localBound)) out.insert(t);
      freeDrfTerms(t.operand(), localBound, out);
      return;
    case TermKind::Add:
    case TermKind::Sub:
    case TermKind::Mul:
      freeDrfTerms(t.lhs(), localBound, out);
      freeDrfTerms(t.rhs(), localBound, out);
      return;
    default:
      return;
  }
}

// drf sub-terms of `f` none of whose variables is bound inside `f`.
void freeDrfTerms(const Formula& f, std::set<std::string>& localBound, std::set<Term>& out) {
  if (f.isAtom()) {
    freeDrfTerms(f.lhsTerm(), localBound, out);
    freeDrfTerms(f.rhsTerm(), localBound, out);
    return;
  }
  if (f.isQuantifier()) {
    bool added = localBound.insert(f.boundVar()).second;
    freeDrfTerms(f.body(), localBound, out);
    if (added) localBound.erase(f.boundVar());
    return;
  }
  if (f.is(FormulaKind::True) || f.is(FormulaKind::False)) return;
  for (const auto& k : f.kids()) freeDrfTerms(k, localBound, out);
}

std::set<Term> freeDrfTerms(const Formula& f) {
  std::set<std::string> bound;
  std::set<Term> out;
  freeDrfTerms(f, bound, out);
  return out;
}

// Rebuilds `f` with every outermost quantifier node replaced by `fn(node)`.
Formula mapQuantifiers(const Formula& f, const std::function<Formula(const Formula&)>& fn) {
  if (f.isQuantifier()) return fn(f);
  switch (f.kind()) {
    case FormulaKind::Not:
      return Formula::negation(mapQuantifiers(f.kid(), fn));
    case FormulaKind::And:
    case FormulaKind::Or: {
      std::vector<Formula> kids;
      for (const auto& k : f.kids()) kids.push_back(mapQuantifiers(k, fn));
      return f.is(FormulaKind::And) ? Formula::conjunction(std::move(kids))
                                    : Formula::disjunction(std::move(kids));
    }
    case FormulaKind::Implies:
      return Formula::implication(mapQuantifiers(f.kid(0), fn), mapQuantifiers(f.kid(1), fn));
    default:
      return f;
  }
}

std::set<std::string> with(std::set<std::string> s, const std::string& v) {
  s.insert(v);
  return s;
}

// Conjoins addr != alpha for the heap reads left after a store. Reads that
// depend on a quantified variable get their disequality under its binder.
Formula addDisequalities(const Formula& f, const Term& alpha, const std::string& proc,
                         const AliasOracle& oracle, const std::string* binder,
                         const std::set<std::string>& scope) {
  Formula g = mapQuantifiers(f, [&](const Formula& q) {
    return Formula::quantifier(q.kind(), q.boundVar(),
                               addDisequalities(q.body(), alpha, proc, oracle, &q.boundVar(),
                                                with(scope, q.boundVar())));
  });
  std::vector<Formula> conj{g};
  for (const auto& t : freeDrfTerms(g)) {
    const Term& beta = t.operand();
    if (beta == alpha) continue;
    if (binder) {
      if (!mentions(beta, *binder)) continue;
    } else if (!oracle.mayAlias(proc, beta, alpha, scope)) {
      continue;
    }
    conj.push_back(Formula::negation(Formula::eq(beta, alpha)));
  }
  return conj.size() == 1 ? g : Formula::conjunction(std::move(conj));
}

std::string freshFor(const Formula& f, const std::set<std::string>& scope) {
  std::set<std::string> avoid = allNames(f);
  avoid.insert(scope.begin(), scope.end());
  return freshName(avoid);
}

Formula havocWrittenReads(const Formula& f, const std::string& proc, const std::string& callee,
                          const AliasOracle& oracle, const std::string* binder,
                          const std::set<std::string>& scope) {
  std::set<Term> reads = freeDrfTerms(f);
  std::vector<Term> order(reads.begin(), reads.end());
  std::stable_sort(order.begin(), order.end(),
                   [](const Term& a, const Term& b) { return a.size() > b.size(); });
  Formula g = f;
  std::vector<std::string> fresh;
  for (const auto& t : order) {
    if (binder && !mentions(t, *binder)) continue;
    if (!oracle.mayBeWritten(proc, t.operand(), callee, scope)) continue;
    std::set<Term> now = freeDrfTerms(g);
    if (!now.count(t)) continue;
    std::string v = freshFor(g, scope);
    g = substitute(g, t, Term::var(v));
    fresh.push_back(v);
  }
  g = mapQuantifiers(g, [&](const Formula& q) {
    return Formula::quantifier(q.kind(), q.boundVar(),
                               havocWrittenReads(q.body(), proc, callee, oracle, &q.boundVar(),
                                                 with(scope, q.boundVar())));
  });
  for (auto it = fresh.rbegin(); it != fresh.rend(); ++it) g = Formula::forall(*it, g);
  return g;
}

// Replaces heap reads through `v` by fresh universals: after `v := malloc(..)`
// the cells at v are unconstrained.
Formula havocReadsThrough(const Formula& f, const std::string& v) {
  std::set<Term> reads = freeDrfTerms(f);
  std::vector<Term> order(reads.begin(), reads.end());
  std::stable_sort(order.begin(), order.end(),
                   [](const Term& a, const Term& b) { return a.size() > b.size(); });
  Formula g = f;
  std::vector<std::string> fresh;
  for (const auto& t : order) {
    if (!mentions(t.operand(), v) || !freeDrfTerms(g).count(t)) continue;
    std::string w = freshFor(g, {v});
    g = substitute(g, t, Term::var(w));
    fresh.push_back(w);
  }
  g = mapQuantifiers(g, [&](const Formula& q) {
    if (q.boundVar() == v) return q;
    return Formula::quantifier(q.kind(), q.boundVar(), havocReadsThrough(q.body(), v));
  });
  for (auto it = fresh.rbegin(); it != fresh.rend(); ++it) g = mkForall(*it, g);
  return g;
}

void collectArith(const Term& t, std::vector<Term>& out) {
  switch (t.kind()) {
    case TermKind::Add:
    case TermKind::Sub:
    case TermKind::Mul:
      collectArith(t.lhs(), out);
      collectArith(t.rhs(), out);
      out.push_back(t);
      return;
    case TermKind::Drf:
      collectArith(t.operand(), out);
      return;
    default:
      return;
  }
}

void collectArith(const Formula& f, std::vector<Term>& out) {
  if (f.isAtom()) {
    collectArith(f.lhsTerm(), out);
    collectArith(f.rhsTerm(), out);
    return;
  }
  if (f.isTrue() || f.isFalse()) return;
  for (const auto& k : f.kids()) collectArith(k, out);
}

Formula ranges(const std::vector<Term>& terms) {
  std::vector<Formula> conj;
  for (const auto& t : terms) {
    conj.push_back(mkNot(mkCmp(FormulaKind::Lt, t, Term::constant(kInt32Min))));
    conj.push_back(mkNot(mkCmp(FormulaKind::Gt, t, Term::constant(kInt32Max))));
  }
  return mkAnd(std::move(conj));
}

}  // namespace

Formula store(const std::string& proc, const Term& target, const Term& value,
              const AliasOracle& oracle, const Formula& phi) {
  const Term& alpha = target.operand();
  Formula substituted = substitute(phi, target, value);
  return simplify(addDisequalities(substituted, alpha, proc, oracle, nullptr, {}));
}

Formula havoc(const std::string& proc, const std::vector<Term>& locs, const AliasOracle& oracle,
              const Formula& phi) {
  Formula f = phi;
  for (const auto& loc : locs) {
    if (loc.isVar()) {
      f = mkForall(loc.name(), f);
      continue;
    }
    std::string v = freshFor(f, freeVars(loc));
    f = mkForall(v, store(proc, loc, Term::var(v), oracle, f));
  }
  return f;
}

Formula havocCall(const std::string& proc, const std::string& callee, const AliasOracle& oracle,
                  const Formula& phi) {
  if (oracle.written(callee).empty() || !hasDrf(phi)) return phi;
  return simplify(havocWrittenReads(phi, proc, callee, oracle, nullptr, {}));
}

Formula summary(const Program& program, const std::string& callee, const SummaryEnv& env,
                const AliasOracle& oracle, const std::vector<std::string>& actuals) {
  const Formula* stored = env.find(callee);
  if (!stored) return Formula::boolean(!oracle.hasAsrts(callee));
  const Procedure* proc = program.find(callee);
  if (!proc) return Formula::falsity();
  // Simultaneous substitution through placeholders.
  std::set<std::string> avoid = allNames(*stored);
  avoid.insert(actuals.begin(), actuals.end());
  avoid.insert(proc->params.begin(), proc->params.end());
  Formula f = *stored;
  std::vector<std::string> placeholders;
  for (std::size_t i = 0; i < proc->params.size(); ++i) {
    std::string h = freshName(avoid, "_p");
    avoid.insert(h);
    placeholders.push_back(h);
    f = substituteVar(f, proc->params[i], Term::var(h));
  }
  for (std::size_t i = 0; i < placeholders.size() && i < actuals.size(); ++i)
    f = substituteVar(f, placeholders[i], Term::var(actuals[i]));
  return simplify(f);
}

Formula rangeConditions(const Term& t) {
  std::vector<Term> terms;
  collectArith(t, terms);
  return ranges(terms);
}

Formula rangeConditions(const Formula& f) {
  std::vector<Term> terms;
  collectArith(f, terms);
  return ranges(terms);
}

Formula inferStatement(const Program& program, const std::string& proc, const AliasOracle& oracle,
                       const SummaryEnv& env, const Formula& phi, const Stmt& s,
                       const InferenceOptions& opts) {
  const bool wrap = opts.intMode == IntMode::Wrap32;
  auto guard = [&](const Formula& cond, const Formula& f) { return wrap ? mkAnd(cond, f) : f; };
  switch (s.kind) {
    case StmtKind::Assign:
      return guard(rangeConditions(s.expr), simplify(substituteVar(phi, s.target, s.expr)));
    case StmtKind::Load:
      return simplify(substituteVar(phi, s.target, Term::drf(Term::var(s.source))));
    case StmtKind::Store:
      return guard(rangeConditions(s.expr),
                   store(proc, Term::drf(Term::var(s.target)), s.expr, oracle, phi));
    case StmtKind::Malloc:
      return guard(rangeConditions(s.expr), mkForall(s.target, havocReadsThrough(phi, s.target)));
    case StmtKind::Havoc:
      return mkForall(s.target, phi);
    case StmtKind::Call: {
      Formula after = s.target.empty() ? phi : mkForall(s.target, phi);
      after = havocCall(proc, s.callee, oracle, after);
      return mkAnd(after, summary(program, s.callee, env, oracle, s.args));
    }
    case StmtKind::Assert:
      return guard(rangeConditions(s.pred), mkAnd(s.pred, phi));
    case StmtKind::Assume:
      return guard(rangeConditions(s.pred), mkImplies(simplify(s.pred), phi));
    case StmtKind::Probe:
      return phi;
    case StmtKind::NondetIf:
      break;
  }
  throw std::logic_error("inferStatement: NondetIf must be handled by the block walker");
}

namespace {

struct BlockInference {
  const Program& program;
  const std::string& proc;
  const AliasOracle& oracle;
  const SummaryEnv& env;
  const InferenceOptions& opts;
  std::map<StmtPath, Formula>& out;

  Formula run(const Block& b, const Formula& post, StmtPath prefix) {
    Formula phi = post;
    prefix.push_back(static_cast<int>(b.size()));
    out[prefix] = phi;
    for (std::size_t i = b.size(); i-- > 0;) {
      prefix.back() = static_cast<int>(i);
      const Stmt& s = b[i];
      if (s.kind == StmtKind::NondetIf) {
        StmtPath thenPath = prefix, elsePath = prefix;
        thenPath.push_back(0);
        elsePath.push_back(1);
        Formula a = run(s.thenBranch, phi, thenPath);
        Formula c = run(s.elseBranch, phi, elsePath);
        phi = mkAnd(a, c);
      } else {
        phi = inferStatement(program, proc, oracle, env, phi, s, opts);
      }
      out[prefix] = phi;
    }
    return phi;
  }
};

}  // namespace

Formula inferBlock(const Program& program, const std::string& proc, const AliasOracle& oracle,
                   const SummaryEnv& env, const Formula& post, const Block& body,
                   const InferenceOptions& opts) {
  std::map<StmtPath, Formula> scratch;
  BlockInference walker{program, proc, oracle, env, opts, scratch};
  return walker.run(body, post, {});
}

InferenceResult inferProgram(const Program& program, const AliasOracle& oracle,
                             const InferenceOptions& opts) {
  InferenceResult r;
  r.annotated.program = program;
  for (const auto& scc : callGraphSccs(program)) {
    for (const auto& name : scc) {
      const Procedure& proc = *program.find(name);
      auto& conds = r.annotated.conditions[name];
      BlockInference walker{program, name, oracle, r.summaries, opts, conds};
      Formula entry = walker.run(proc.body, Formula::truth(), {});
      // The return variable starts out as 0.
      r.summaries.set(name, simplify(substituteVar(entry, proc.ret, Term::constant(0))));
    }
  }
  return r;
}

std::string dumpConditions(const AnnotatedProgram& annotated) {
  std::string out;
  for (const auto& proc : annotated.program.procedures) {
    auto it = annotated.conditions.find(proc.name);
    if (it == annotated.conditions.end()) continue;
    std::vector<std::pair<std::pair<int, int>, std::string>> lines;
    for (const auto& [path, f] : it->second) {
      const Stmt* s = statementAt(proc, path);
      if (!s || !s->span.known()) continue;
      lines.push_back({{s->span.line, s->span.column}, proc.name + ":" + std::to_string(s->span.line) + ": " + toString(f)});
    }
    std::stable_sort(lines.begin(), lines.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& l : lines) out += l.second + "\n";
  }
  return out;
}

}  // namespace trim
