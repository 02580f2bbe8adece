#include "trim/formula_engine.hpp"

#include <cassert>

#include "trim/linear.hpp"

namespace trim {

Formula negateToTrim(const Formula& safety) { return toNnf(mkNot(safety)); }

namespace {

using Conjunct = std::vector<Formula>;
using Dnf = std::vector<Conjunct>;

// Distributes an NNF quantifier-free formula; nullopt once the total number
// of literals exceeds `cap`.
std::optional<Dnf> toDnf(const Formula& f, std::size_t cap) {
  switch (f.kind()) {
    case FormulaKind::True:
      return Dnf{Conjunct{}};
    case FormulaKind::False:
      return Dnf{};
    case FormulaKind::Or: {
      Dnf out;
      std::size_t literals = 0;
      for (const auto& k : f.kids()) {
        auto sub = toDnf(k, cap);
        if (!sub) return std::nullopt;
        for (auto& c : *sub) {
          literals += c.size();
          if (literals > cap) return std::nullopt;
          out.push_back(std::move(c));
        }
      }
      return out;
    }
    case FormulaKind::And: {
      Dnf acc{Conjunct{}};
      for (const auto& k : f.kids()) {
        auto sub = toDnf(k, cap);
        if (!sub) return std::nullopt;
        Dnf next;
        std::size_t literals = 0;
        for (const auto& a : acc) {
          for (const auto& b : *sub) {
            Conjunct c = a;
            c.insert(c.end(), b.begin(), b.end());
            literals += c.size();
            if (literals > cap) return std::nullopt;
            next.push_back(std::move(c));
          }
        }
        acc = std::move(next);
      }
      return acc;
    }
    default:
      if (cap == 0) return std::nullopt;
      return Dnf{Conjunct{f}};
  }
}

// A literal mentioning the eliminated variable, normalized so that the
// variable has coefficient +1 or -1.
struct Classified {
  // Independent: the variable cancels out (x + q < z + q).
  enum Kind { Bad, Independent, Equality, Disequality, Lower, Upper } kind = Bad;
  Term bound;  // solution for Equality; strict bound for Lower/Upper
};

Classified classify(const Formula& lit, const Term& q) {
  bool negated = lit.is(FormulaKind::Not);
  const Formula& atom = negated ? lit.kid() : lit;
  if (!atom.isAtom()) return {};
  auto l = LinearForm::of(atom.lhsTerm());
  auto r = LinearForm::of(atom.rhsTerm());
  if (!l || !r) return {};
  auto diff = l->minus(*r);  // lhs - rhs
  if (!diff) return {};
  Int c = diff->coeff(q);
  for (const auto& [a, k] : diff->coeffs()) {
    if (!(a == q) && mentions(a, q.name())) return {};
  }
  if (c == 0) return {Classified::Independent, {}};
  if (c != 1 && c != -1) return {};

  if (atom.is(FormulaKind::Eq)) {
    if (negated) return {Classified::Disequality, {}};
    // c*q + R = 0  =>  q = -R/c
    auto sol = diff->without(q).scaled(-c);
    if (!sol) return {};
    return {Classified::Equality, sol->toTerm()};
  }

  // Express as G > 0.
  std::optional<LinearForm> g;
  const bool lt = atom.is(FormulaKind::Lt);
  if (!negated) {
    g = lt ? diff->scaled(-1) : diff;
  } else {
    auto base = lt ? std::optional<LinearForm>(diff) : diff->scaled(-1);
    if (base) g = base->plus(LinearForm(1));
  }
  if (!g) return {};
  Int cg = g->coeff(q);
  LinearForm rest = g->without(q);
  if (cg == 1) {
    // q + R > 0  =>  q > -R
    auto lb = rest.scaled(-1);
    if (!lb) return {};
    return {Classified::Lower, lb->toTerm()};
  }
  // -q + R > 0  =>  q < R
  return {Classified::Upper, rest.toTerm()};
}

Formula eliminateFromConjunct(const std::string& var, const Conjunct& lits, bool& exact) {
  const Term q = Term::var(var);
  std::vector<Formula> rest, dependent;
  for (const auto& l : lits) (mentions(l, var) ? dependent : rest).push_back(l);
  if (dependent.empty()) return mkAnd(rest);

  std::vector<Classified> classes;
  classes.reserve(dependent.size());
  for (const auto& l : dependent) classes.push_back(classify(l, q));
  for (std::size_t i = dependent.size(); i-- > 0;) {
    if (classes[i].kind != Classified::Independent) continue;
    rest.push_back(simplify(substitute(dependent[i], q, Term::constant(0))));
    dependent.erase(dependent.begin() + static_cast<std::ptrdiff_t>(i));
    classes.erase(classes.begin() + static_cast<std::ptrdiff_t>(i));
  }
  if (dependent.empty()) return mkAnd(rest);

  for (std::size_t i = 0; i < dependent.size(); ++i) {
    if (classes[i].kind != Classified::Equality) continue;
    std::vector<Formula> out = rest;
    for (std::size_t j = 0; j < dependent.size(); ++j)
      if (j != i) out.push_back(simplify(substitute(dependent[j], q, classes[i].bound)));
    return mkAnd(std::move(out));
  }

  std::vector<Formula> good;
  std::vector<Term> lowers, uppers;
  std::size_t disequalities = 0;
  for (std::size_t i = 0; i < dependent.size(); ++i) {
    switch (classes[i].kind) {
      case Classified::Bad:
        exact = false;
        continue;
      case Classified::Lower:
        lowers.push_back(classes[i].bound);
        break;
      case Classified::Upper:
        uppers.push_back(classes[i].bound);
        break;
      case Classified::Disequality:
        ++disequalities;
        break;
      default:
        break;
    }
    good.push_back(dependent[i]);
  }
  if (lowers.empty() && uppers.empty()) return mkAnd(rest);

  // The least (or greatest) solution lies within `disequalities` steps of
  // the tightest strict bound, so these test points are exhaustive.
  const bool fromBelow = !lowers.empty();
  const auto& bounds = fromBelow ? lowers : uppers;
  std::vector<Formula> candidates;
  for (const auto& b : bounds) {
    for (std::size_t k = 0; k <= disequalities; ++k) {
      Int offset = static_cast<Int>(k) + 1;
      auto lb = LinearForm::of(b);
      if (!lb) {
        exact = false;
        continue;
      }
      auto w = lb->plus(LinearForm(fromBelow ? offset : -offset));
      if (!w) {
        exact = false;
        continue;
      }
      Term witness = w->toTerm();
      std::vector<Formula> conj = rest;
      for (const auto& g : good) conj.push_back(simplify(substitute(g, q, witness)));
      candidates.push_back(mkAnd(std::move(conj)));
    }
  }
  return mkOr(std::move(candidates));
}

}  // namespace

ExistsElimination eliminateExists(const std::string& var, const Formula& body, std::size_t dnfCap) {
  if (hasQuantifier(body)) return {body, false, true};
  Formula nnf = toNnf(body);
  if (!mentions(nnf, var)) return {nnf, true, false};
  auto dnf = toDnf(nnf, dnfCap);
  if (!dnf) return {body, false, true};
  bool exact = true;
  std::vector<Formula> disjuncts;
  for (const auto& c : *dnf) disjuncts.push_back(eliminateFromConjunct(var, c, exact));
  return {mkOr(std::move(disjuncts)), exact, false};
}

std::optional<Formula> eliminateExistsExact(const std::string& var, const Formula& body,
                                            std::size_t dnfCap) {
  auto r = eliminateExists(var, body, dnfCap);
  if (r.capExceeded || !r.exact) return std::nullopt;
  return r.formula;
}

namespace {

Formula eliminateRec(const Formula& f, std::size_t cap) {
  switch (f.kind()) {
    case FormulaKind::Exists: {
      Formula body = eliminateRec(f.body(), cap);
      if (hasQuantifier(body)) return Formula::exists(f.boundVar(), body);
      auto r = eliminateExists(f.boundVar(), body, cap);
      if (r.capExceeded) return Formula::exists(f.boundVar(), body);
      return r.formula;
    }
    case FormulaKind::Forall:
      return Formula::forall(f.boundVar(), eliminateRec(f.body(), cap));
    case FormulaKind::And:
    case FormulaKind::Or: {
      std::vector<Formula> kids;
      for (const auto& k : f.kids()) kids.push_back(eliminateRec(k, cap));
      return f.is(FormulaKind::And) ? mkAnd(std::move(kids)) : mkOr(std::move(kids));
    }
    default:
      return f;
  }
}

Formula stripQuantifiers(const Formula& f, std::set<std::string>& used, std::vector<std::string>& vars) {
  switch (f.kind()) {
    case FormulaKind::Exists:
    case FormulaKind::Forall: {
      std::string name = f.boundVar();
      Formula body = f.body();
      if (used.count(name)) {
        std::set<std::string> avoid = used;
        auto inner = allNames(body);
        avoid.insert(inner.begin(), inner.end());
        std::string fresh = freshName(avoid);
        body = substituteVar(body, name, Term::var(fresh));
        name = fresh;
      }
      used.insert(name);
      vars.push_back(name);
      return stripQuantifiers(body, used, vars);
    }
    case FormulaKind::And:
    case FormulaKind::Or: {
      std::vector<Formula> kids;
      for (const auto& k : f.kids()) kids.push_back(stripQuantifiers(k, used, vars));
      return f.is(FormulaKind::And) ? Formula::conjunction(std::move(kids))
                                    : Formula::disjunction(std::move(kids));
    }
    case FormulaKind::Not:
      return Formula::negation(stripQuantifiers(f.kid(), used, vars));
    case FormulaKind::Implies:
      return Formula::implication(stripQuantifiers(f.kid(0), used, vars),
                                  stripQuantifiers(f.kid(1), used, vars));
    default:
      return f;
  }
}

}  // namespace

TrimmingCondition eliminateQuantifiers(const Formula& f, std::size_t dnfCap) {
  return nondetEncode(eliminateRec(toNnf(f), dnfCap));
}

TrimmingCondition nondetEncode(const Formula& f) {
  TrimmingCondition out;
  std::set<std::string> used = freeVars(f);
  out.predicate = stripQuantifiers(f, used, out.nondetVars);
  return out;
}

Formula boundConjuncts(const Formula& f, std::size_t k) {
  assert(k >= 1);
  switch (f.kind()) {
    case FormulaKind::And: {
      std::vector<Formula> kids;
      for (const auto& c : f.kids()) {
        if (kids.size() == k) break;
        kids.push_back(boundConjuncts(c, k));
      }
      if (kids.size() == 1) return kids.front();
      return Formula::conjunction(std::move(kids));
    }
    case FormulaKind::Or: {
      std::vector<Formula> kids;
      for (const auto& c : f.kids()) kids.push_back(boundConjuncts(c, k));
      return Formula::disjunction(std::move(kids));
    }
    case FormulaKind::Exists:
    case FormulaKind::Forall:
      return Formula::quantifier(f.kind(), f.boundVar(), boundConjuncts(f.body(), k));
    default:
      return f;
  }
}

}  // namespace trim
