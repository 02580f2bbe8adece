#include "trim/alias.hpp"

#include <algorithm>
#include <functional>

namespace trim {

namespace {

std::string key(const std::string& proc, const std::string& v) { return proc + "::" + v; }

struct Constraints {
  struct Copy {
    std::string dst, src;
  };
  struct Load {
    std::string dst, ptr;
  };
  struct Store {
    std::string ptr;
    std::vector<std::string> srcs;
  };
  std::vector<Copy> copies;
  std::vector<Load> loads;
  std::vector<Store> stores;
  std::vector<std::pair<std::string, int>> addrs;
  // Operands of drf terms inside expressions and predicates.
  std::vector<std::pair<std::string, Term>> readOperands;
};

std::set<Term> derefsOf(const Stmt& s) {
  std::set<Term> out;
  if (s.pred.valid()) out = derefs(s.pred);
  if (s.expr.valid()) {
    auto more = derefs(Formula::eq(s.expr, Term::constant(0)));
    out.insert(more.begin(), more.end());
  }
  return out;
}

bool addAll(ObjectSet& into, const ObjectSet& from) {
  std::size_t before = into.size();
  into.insert(from.begin(), from.end());
  return into.size() != before;
}

void collectProcVars(const Block& b, std::set<std::string>& out) {
  for (const auto& s : b) {
    for (const auto& v : readsOf(s)) out.insert(v);
    if (!s.target.empty()) out.insert(s.target);
    collectProcVars(s.thenBranch, out);
    collectProcVars(s.elseBranch, out);
  }
}

bool containsAssert(const Block& b) {
  for (const auto& s : b) {
    if (s.kind == StmtKind::Assert) return true;
    if (containsAssert(s.thenBranch) || containsAssert(s.elseBranch)) return true;
  }
  return false;
}

std::string joinNames(const ObjectSet& objs, const std::vector<std::string>& names) {
  std::vector<std::string> sorted;
  for (int o : objs) sorted.push_back(names[static_cast<std::size_t>(o)]);
  std::sort(sorted.begin(), sorted.end());
  std::string out = "{";
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (i) out += ", ";
    out += sorted[i];
  }
  return out + "}";
}

}  // namespace

AliasOracle AliasOracle::build(const Program& p) {
  AliasOracle o;
  o.objectNames_.push_back("ext");
  o.contents_.emplace_back();

  Constraints c;
  std::map<std::string, std::vector<std::string>> callees;
  std::map<std::string, std::set<std::string>> callers;

  for (const auto& proc : p.procedures) {
    std::set<std::string> vars(proc.params.begin(), proc.params.end());
    vars.insert(proc.ret);
    collectProcVars(proc.body, vars);
    o.procVars_[proc.name] = {vars.begin(), vars.end()};
    for (const auto& v : vars) o.vars_[key(proc.name, v)];

    int site = 0;
    std::function<void(const Block&)> walk = [&](const Block& b) {
      for (const auto& s : b) {
        for (const auto& t : derefsOf(s)) c.readOperands.push_back({proc.name, t});
        switch (s.kind) {
          case StmtKind::Assign:
            for (const auto& v : freeVars(s.expr)) c.copies.push_back({key(proc.name, s.target), key(proc.name, v)});
            break;
          case StmtKind::Load:
            c.loads.push_back({key(proc.name, s.target), key(proc.name, s.source)});
            break;
          case StmtKind::Store: {
            Constraints::Store st{key(proc.name, s.target), {}};
            for (const auto& v : freeVars(s.expr)) st.srcs.push_back(key(proc.name, v));
            c.stores.push_back(std::move(st));
            break;
          }
          case StmtKind::Malloc: {
            int obj = static_cast<int>(o.objectNames_.size());
            o.objectNames_.push_back(proc.name + ":malloc#" + std::to_string(site++));
            o.contents_.emplace_back();
            c.addrs.push_back({key(proc.name, s.target), obj});
            break;
          }
          case StmtKind::Call: {
            const Procedure* callee = p.find(s.callee);
            if (!callee) break;
            callees[proc.name].push_back(s.callee);
            if (s.callee != proc.name) callers[s.callee].insert(proc.name);
            for (std::size_t i = 0; i < s.args.size() && i < callee->params.size(); ++i)
              c.copies.push_back({key(s.callee, callee->params[i]), key(proc.name, s.args[i])});
            if (!s.target.empty()) c.copies.push_back({key(proc.name, s.target), key(s.callee, callee->ret)});
            break;
          }
          case StmtKind::NondetIf:
            walk(s.thenBranch);
            walk(s.elseBranch);
            break;
          default:
            break;
        }
      }
    };
    walk(proc.body);
  }

  // Variables whose value may end up used as an address. Only those root
  // parameters point to caller memory; the rest are plain integers.
  std::set<std::string> addressy;
  for (const auto& ld : c.loads) addressy.insert(ld.ptr);
  for (const auto& st : c.stores) addressy.insert(st.ptr);
  bool loadsMatter = false;
  for (const auto& [proc, t] : c.readOperands) {
    for (const auto& v : freeVars(t)) addressy.insert(key(proc, v));
    if (!derefs(Formula::eq(t, Term::constant(0))).empty()) loadsMatter = true;
  }
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& cp : c.copies)
      if (addressy.count(cp.dst)) changed |= addressy.insert(cp.src).second;
    for (const auto& ld : c.loads) loadsMatter |= addressy.count(ld.dst) > 0;
    if (loadsMatter)
      for (const auto& st : c.stores)
        for (const auto& src : st.srcs) changed |= addressy.insert(src).second;
  }
  // Caller memory may hold pointers into caller memory; that only matters
  // when a loaded value is dereferenced.
  if (loadsMatter) o.contents_[0].insert(0);
  for (const auto& proc : p.procedures) {
    if (proc.name == p.entry || callers[proc.name].empty())
      for (const auto& v : proc.params)
        if (addressy.count(key(proc.name, v))) c.addrs.push_back({key(proc.name, v), 0});
  }

  for (const auto& [v, obj] : c.addrs) o.vars_[v].insert(obj);
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& cp : c.copies) {
      ObjectSet src = o.vars_[cp.src];
      changed |= addAll(o.vars_[cp.dst], src);
    }
    for (const auto& ld : c.loads) {
      ObjectSet ptrs = o.vars_[ld.ptr];
      for (int obj : ptrs) {
        ObjectSet cell = o.contents_[static_cast<std::size_t>(obj)];
        changed |= addAll(o.vars_[ld.dst], cell);
      }
    }
    for (const auto& st : c.stores) {
      ObjectSet ptrs = o.vars_[st.ptr];
      for (int obj : ptrs)
        for (const auto& src : st.srcs) {
          ObjectSet vals = o.vars_[src];
          changed |= addAll(o.contents_[static_cast<std::size_t>(obj)], vals);
        }
    }
  }

  // Direct effects, then closure over the call graph.
  for (const auto& proc : p.procedures) {
    ObjectSet& w = o.written_[proc.name];
    bool asserts = containsAssert(proc.body);
    o.hasAsrts_[proc.name] = asserts;
    std::function<void(const Block&)> walk = [&](const Block& b) {
      for (const auto& s : b) {
        if (s.kind == StmtKind::Store) addAll(w, o.vars_[key(proc.name, s.target)]);
        walk(s.thenBranch);
        walk(s.elseBranch);
      }
    };
    walk(proc.body);
  }
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& proc : p.procedures) {
      for (const auto& callee : callees[proc.name]) {
        ObjectSet w = o.written_[callee];
        changed |= addAll(o.written_[proc.name], w);
        if (o.hasAsrts_[callee] && !o.hasAsrts_[proc.name]) {
          o.hasAsrts_[proc.name] = true;
          changed = true;
        }
      }
    }
  }

  for (const auto& proc : p.procedures) {
    const ObjectSet& w = o.written_[proc.name];
    std::set<Term>& mods = o.modLocs_[proc.name];
    bool widened = false;
    for (const auto& x : proc.params) {
      const ObjectSet& level1 = o.vars_[key(proc.name, x)];
      ObjectSet level2;
      for (int obj : level1) addAll(level2, o.contents_[static_cast<std::size_t>(obj)]);
      auto hits = [&w](const ObjectSet& s) {
        return std::any_of(s.begin(), s.end(), [&w](int obj) { return w.count(obj) > 0; });
      };
      if (hits(level1)) mods.insert(Term::drf(Term::var(x)));
      if (hits(level2)) mods.insert(Term::drf(Term::drf(Term::var(x))));
      // Objects only reachable at depth three or more.
      ObjectSet seen = level1;
      addAll(seen, level2);
      ObjectSet frontier = level2;
      while (!frontier.empty()) {
        ObjectSet next;
        for (int obj : frontier)
          for (int t : o.contents_[static_cast<std::size_t>(obj)])
            if (seen.insert(t).second) next.insert(t);
        if (hits(next)) widened = true;
        frontier = std::move(next);
      }
    }
    o.widened_[proc.name] = widened;
  }
  return o;
}

std::optional<ObjectSet> AliasOracle::pointsTo(const std::string& proc, const Term& t,
                                               const std::set<std::string>& bound) const {
  switch (t.kind()) {
    case TermKind::Const:
      return ObjectSet{};
    case TermKind::Var: {
      if (bound.count(t.name())) return std::nullopt;
      auto it = vars_.find(key(proc, t.name()));
      if (it == vars_.end()) return std::nullopt;
      return it->second;
    }
    case TermKind::Drf: {
      auto ptrs = pointsTo(proc, t.operand(), bound);
      if (!ptrs) return std::nullopt;
      ObjectSet out;
      for (int obj : *ptrs) addAll(out, contents_[static_cast<std::size_t>(obj)]);
      return out;
    }
    default: {
      auto l = pointsTo(proc, t.lhs(), bound);
      auto r = pointsTo(proc, t.rhs(), bound);
      if (!l || !r) return std::nullopt;
      addAll(*l, *r);
      return l;
    }
  }
}

bool AliasOracle::mayAlias(const std::string& proc, const Term& a, const Term& b,
                           const std::set<std::string>& bound) const {
  if (a == b) return true;
  auto pa = pointsTo(proc, a, bound);
  auto pb = pointsTo(proc, b, bound);
  if (!pa || !pb) return true;
  return std::any_of(pa->begin(), pa->end(), [&pb](int obj) { return pb->count(obj) > 0; });
}

std::set<Term> AliasOracle::aliases(const std::string& proc, const Term& loc) const {
  std::set<Term> out{loc};
  auto it = procVars_.find(proc);
  if (it == procVars_.end()) return out;
  for (const auto& v : it->second) {
    Term t = Term::var(v);
    for (int depth = 0; depth < 3; ++depth) {
      if (mayAlias(proc, loc, t)) out.insert(t);
      t = Term::drf(t);
    }
  }
  return out;
}

const std::set<Term>& AliasOracle::modLocs(const std::string& proc) const {
  static const std::set<Term> kEmpty;
  auto it = modLocs_.find(proc);
  return it == modLocs_.end() ? kEmpty : it->second;
}

bool AliasOracle::modWidened(const std::string& proc) const {
  auto it = widened_.find(proc);
  return it != widened_.end() && it->second;
}

const ObjectSet& AliasOracle::written(const std::string& proc) const {
  static const ObjectSet kEmpty;
  auto it = written_.find(proc);
  return it == written_.end() ? kEmpty : it->second;
}

bool AliasOracle::mayBeWritten(const std::string& caller, const Term& loc, const std::string& callee,
                               const std::set<std::string>& bound) const {
  const ObjectSet& w = written(callee);
  if (w.empty()) return false;
  auto pts = pointsTo(caller, loc, bound);
  if (!pts) return true;
  return std::any_of(pts->begin(), pts->end(), [&w](int obj) { return w.count(obj) > 0; });
}

bool AliasOracle::hasAsrts(const std::string& proc) const {
  auto it = hasAsrts_.find(proc);
  return it != hasAsrts_.end() && it->second;
}

std::string AliasOracle::dump() const {
  std::string out;
  for (const auto& [v, objs] : vars_) {
    if (objs.empty()) continue;
    out += v + " -> " + joinNames(objs, objectNames_) + "\n";
  }
  for (std::size_t i = 0; i < contents_.size(); ++i) {
    if (contents_[i].empty()) continue;
    out += "*" + objectNames_[i] + " -> " + joinNames(contents_[i], objectNames_) + "\n";
  }
  return out;
}

std::vector<std::vector<std::string>> callGraphSccs(const Program& p) {
  std::map<std::string, std::size_t> order;
  for (std::size_t i = 0; i < p.procedures.size(); ++i) order[p.procedures[i].name] = i;
  std::vector<std::vector<std::size_t>> edges(p.procedures.size());
  for (std::size_t i = 0; i < p.procedures.size(); ++i) {
    std::vector<std::string> cs;
    collectCallees(p.procedures[i].body, cs);
    for (const auto& c : cs)
      if (order.count(c)) edges[i].push_back(order[c]);
  }

  std::vector<int> index(p.procedures.size(), -1), low(p.procedures.size(), 0);
  std::vector<bool> onStack(p.procedures.size(), false);
  std::vector<std::size_t> stack;
  std::vector<std::vector<std::string>> out;
  int counter = 0;
  std::function<void(std::size_t)> connect = [&](std::size_t v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    onStack[v] = true;
    for (std::size_t w : edges[v]) {
      if (index[w] < 0) {
        connect(w);
        low[v] = std::min(low[v], low[w]);
      } else if (onStack[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      std::vector<std::size_t> members;
      std::size_t w;
      do {
        w = stack.back();
        stack.pop_back();
        onStack[w] = false;
        members.push_back(w);
      } while (w != v);
      std::sort(members.begin(), members.end());
      std::vector<std::string> names;
      for (std::size_t m : members) names.push_back(p.procedures[m].name);
      out.push_back(std::move(names));
    }
  };
  for (std::size_t i = 0; i < p.procedures.size(); ++i)
    if (index[i] < 0) connect(i);
  return out;
}

std::set<std::string> reachableProcedures(const Program& p) {
  std::set<std::string> seen;
  std::vector<std::string> work{p.entry};
  while (!work.empty()) {
    std::string name = work.back();
    work.pop_back();
    const Procedure* proc = p.find(name);
    if (!proc || !seen.insert(name).second) continue;
    std::vector<std::string> cs;
    collectCallees(proc->body, cs);
    work.insert(work.end(), cs.begin(), cs.end());
  }
  return seen;
}

}  // namespace trim
