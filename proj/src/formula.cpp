#include "trim/formula.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

#include "trim/formula_engine.hpp"
#include "trim/linear.hpp"

namespace trim {

struct Formula::Node {
  FormulaKind kind;
  Term a;
  Term b;
  std::vector<Formula> kids;
  std::string var;
  std::size_t size = 1;
};

namespace {

const std::vector<Formula> kNoKids;

std::size_t sizeOf(const std::vector<Formula>& kids) {
  std::size_t s = 1;
  for (const auto& k : kids) s += k.size();
  return s;
}

}  // namespace

Formula Formula::truth() {
  static const Formula t(std::make_shared<const Node>(Node{FormulaKind::True, {}, {}, {}, {}, 1}));
  return t;
}

Formula Formula::falsity() {
  static const Formula f(std::make_shared<const Node>(Node{FormulaKind::False, {}, {}, {}, {}, 1}));
  return f;
}

Formula Formula::cmp(FormulaKind op, Term lhs, Term rhs) {
  assert(op == FormulaKind::Lt || op == FormulaKind::Gt || op == FormulaKind::Eq);
  std::size_t size = 1 + lhs.size() + rhs.size();
  return Formula(std::make_shared<const Node>(Node{op, std::move(lhs), std::move(rhs), {}, {}, size}));
}

Formula Formula::negation(Formula f) {
  std::vector<Formula> kids{std::move(f)};
  std::size_t size = sizeOf(kids);
  return Formula(std::make_shared<const Node>(Node{FormulaKind::Not, {}, {}, std::move(kids), {}, size}));
}

Formula Formula::conjunction(std::vector<Formula> kids) {
  std::size_t size = sizeOf(kids);
  return Formula(std::make_shared<const Node>(Node{FormulaKind::And, {}, {}, std::move(kids), {}, size}));
}

Formula Formula::disjunction(std::vector<Formula> kids) {
  std::size_t size = sizeOf(kids);
  return Formula(std::make_shared<const Node>(Node{FormulaKind::Or, {}, {}, std::move(kids), {}, size}));
}

Formula Formula::implication(Formula lhs, Formula rhs) {
  std::vector<Formula> kids{std::move(lhs), std::move(rhs)};
  std::size_t size = sizeOf(kids);
  return Formula(std::make_shared<const Node>(Node{FormulaKind::Implies, {}, {}, std::move(kids), {}, size}));
}

Formula Formula::quantifier(FormulaKind kind, std::string var, Formula body) {
  assert(kind == FormulaKind::Forall || kind == FormulaKind::Exists);
  std::vector<Formula> kids{std::move(body)};
  std::size_t size = sizeOf(kids);
  return Formula(std::make_shared<const Node>(Node{kind, {}, {}, std::move(kids), std::move(var), size}));
}

Formula Formula::forall(std::string var, Formula body) {
  return quantifier(FormulaKind::Forall, std::move(var), std::move(body));
}

Formula Formula::exists(std::string var, Formula body) {
  return quantifier(FormulaKind::Exists, std::move(var), std::move(body));
}

FormulaKind Formula::kind() const { return node_->kind; }

bool Formula::isAtom() const {
  if (!valid()) return false;
  auto k = kind();
  return k == FormulaKind::Lt || k == FormulaKind::Gt || k == FormulaKind::Eq;
}

const Term& Formula::lhsTerm() const { return node_->a; }
const Term& Formula::rhsTerm() const { return node_->b; }
const std::vector<Formula>& Formula::kids() const { return node_ ? node_->kids : kNoKids; }
const std::string& Formula::boundVar() const { return node_->var; }
std::size_t Formula::size() const { return node_ ? node_->size : 0; }

bool operator==(const Formula& a, const Formula& b) { return (a <=> b) == 0; }

std::strong_ordering operator<=>(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return std::strong_ordering::equal;
  if (!a.node_) return std::strong_ordering::less;
  if (!b.node_) return std::strong_ordering::greater;
  if (auto c = a.kind() <=> b.kind(); c != 0) return c;
  if (a.isAtom()) {
    if (auto c = a.lhsTerm() <=> b.lhsTerm(); c != 0) return c;
    return a.rhsTerm() <=> b.rhsTerm();
  }
  if (a.isQuantifier()) {
    if (auto c = a.boundVar().compare(b.boundVar()) <=> 0; c != 0) return c;
  }
  const auto& ka = a.kids();
  const auto& kb = b.kids();
  for (std::size_t i = 0; i < ka.size() && i < kb.size(); ++i)
    if (auto c = ka[i] <=> kb[i]; c != 0) return c;
  return ka.size() <=> kb.size();
}

// ---------------------------------------------------------------------------
// Printing

namespace {

int precedence(const Formula& f) {
  switch (f.kind()) {
    case FormulaKind::Forall:
    case FormulaKind::Exists:
      return 0;
    case FormulaKind::Implies:
      return 1;
    case FormulaKind::Or:
      return 2;
    case FormulaKind::And:
      return 3;
    case FormulaKind::Not:
      return 4;
    default:
      return 5;
  }
}

const char* cmpOp(FormulaKind k, bool negated) {
  switch (k) {
    case FormulaKind::Lt:
      return negated ? " >= " : " < ";
    case FormulaKind::Gt:
      return negated ? " <= " : " > ";
    default:
      return negated ? " != " : " = ";
  }
}

void print(const Formula& f, std::string& out);

void printChild(const Formula& child, bool parens, std::string& out) {
  if (parens) out += "(";
  print(child, out);
  if (parens) out += ")";
}

void print(const Formula& f, std::string& out) {
  switch (f.kind()) {
    case FormulaKind::True:
      out += "true";
      return;
    case FormulaKind::False:
      out += "false";
      return;
    case FormulaKind::Lt:
    case FormulaKind::Gt:
    case FormulaKind::Eq:
      out += toString(f.lhsTerm());
      out += cmpOp(f.kind(), false);
      out += toString(f.rhsTerm());
      return;
    case FormulaKind::Not: {
      const Formula& k = f.kid();
      if (k.isAtom()) {
        out += toString(k.lhsTerm());
        out += cmpOp(k.kind(), true);
        out += toString(k.rhsTerm());
        return;
      }
      out += "!";
      printChild(k, precedence(k) <= 4, out);
      return;
    }
    case FormulaKind::And:
    case FormulaKind::Or: {
      int p = precedence(f);
      const char* sep = f.kind() == FormulaKind::And ? " && " : " || ";
      for (std::size_t i = 0; i < f.kids().size(); ++i) {
        if (i) out += sep;
        printChild(f.kids()[i], precedence(f.kids()[i]) <= p, out);
      }
      return;
    }
    case FormulaKind::Implies:
      printChild(f.kid(0), precedence(f.kid(0)) <= 1, out);
      out += " => ";
      printChild(f.kid(1), precedence(f.kid(1)) < 1, out);
      return;
    case FormulaKind::Forall:
    case FormulaKind::Exists:
      out += f.kind() == FormulaKind::Forall ? "forall " : "exists ";
      out += f.boundVar();
      out += ". ";
      print(f.body(), out);
      return;
  }
}

}  // namespace

std::string toString(const Formula& f) {
  if (!f.valid()) return "<null>";
  std::string out;
  print(f, out);
  return out;
}

// ---------------------------------------------------------------------------
// Queries

namespace {

void collectFree(const Formula& f, std::set<std::string>& bound, std::set<std::string>& out) {
  if (f.isAtom()) {
    std::set<std::string> vs;
    collectVars(f.lhsTerm(), vs);
    collectVars(f.rhsTerm(), vs);
    for (const auto& v : vs)
      if (!bound.count(v)) out.insert(v);
    return;
  }
  if (f.isQuantifier()) {
    bool inserted = bound.insert(f.boundVar()).second;
    collectFree(f.body(), bound, out);
    if (inserted) bound.erase(f.boundVar());
    return;
  }
  for (const auto& k : f.kids()) collectFree(k, bound, out);
}

void collectAll(const Formula& f, std::set<std::string>& out) {
  if (f.isAtom()) {
    collectVars(f.lhsTerm(), out);
    collectVars(f.rhsTerm(), out);
    return;
  }
  if (f.isQuantifier()) out.insert(f.boundVar());
  for (const auto& k : f.kids()) collectAll(k, out);
}

template <typename Pred>
bool anyTerm(const Formula& f, Pred pred) {
  if (f.isAtom()) return pred(f.lhsTerm()) || pred(f.rhsTerm());
  for (const auto& k : f.kids())
    if (anyTerm(k, pred)) return true;
  return false;
}

bool termHasDrf(const Term& t) {
  switch (t.kind()) {
    case TermKind::Drf:
      return true;
    case TermKind::Var:
    case TermKind::Const:
      return false;
    default:
      return termHasDrf(t.lhs()) || termHasDrf(t.rhs());
  }
}

bool termHasArith(const Term& t) {
  switch (t.kind()) {
    case TermKind::Var:
    case TermKind::Const:
      return false;
    case TermKind::Drf:
      return termHasArith(t.operand());
    default:
      return true;
  }
}

}  // namespace

std::set<std::string> freeVars(const Formula& f) {
  std::set<std::string> bound, out;
  collectFree(f, bound, out);
  return out;
}

std::set<std::string> allNames(const Formula& f) {
  std::set<std::string> out;
  collectAll(f, out);
  return out;
}

std::set<Term> derefs(const Formula& f) {
  std::set<Term> out;
  if (f.isAtom()) {
    collectDerefs(f.lhsTerm(), out);
    collectDerefs(f.rhsTerm(), out);
    return out;
  }
  for (const auto& k : f.kids()) {
    auto sub = derefs(k);
    out.insert(sub.begin(), sub.end());
  }
  return out;
}

bool mentions(const Formula& f, const std::string& var) { return freeVars(f).count(var) > 0; }

bool hasQuantifier(const Formula& f) {
  if (f.isQuantifier()) return true;
  for (const auto& k : f.kids())
    if (hasQuantifier(k)) return true;
  return false;
}

bool hasDrf(const Formula& f) { return anyTerm(f, termHasDrf); }
bool hasArith(const Formula& f) { return anyTerm(f, termHasArith); }

std::string freshName(const std::set<std::string>& avoid, const std::string& prefix) {
  long next = 0;
  for (const auto& name : avoid) {
    if (name.size() <= prefix.size() || name.compare(0, prefix.size(), prefix) != 0) continue;
    const std::string digits = name.substr(prefix.size());
    if (!std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; })) continue;
    if (digits.size() > 9) continue;
    next = std::max(next, std::stol(digits) + 1);
  }
  return prefix + std::to_string(next);
}

// ---------------------------------------------------------------------------
// Substitution

Formula substitute(const Formula& f, const Term& from, const Term& to) {
  if (f.isAtom()) {
    Term l = trim::substitute(f.lhsTerm(), from, to);
    Term r = trim::substitute(f.rhsTerm(), from, to);
    if (l == f.lhsTerm() && r == f.rhsTerm()) return f;
    return Formula::cmp(f.kind(), std::move(l), std::move(r));
  }
  switch (f.kind()) {
    case FormulaKind::True:
    case FormulaKind::False:
      return f;
    case FormulaKind::Forall:
    case FormulaKind::Exists: {
      const std::string& q = f.boundVar();
      if (mentions(from, q) || mentions(to, q)) {
        std::set<std::string> avoid = allNames(f.body());
        collectVars(from, avoid);
        collectVars(to, avoid);
        avoid.insert(q);
        std::string fresh = freshName(avoid);
        Formula renamed = substitute(f.body(), Term::var(q), Term::var(fresh));
        return Formula::quantifier(f.kind(), fresh, substitute(renamed, from, to));
      }
      Formula body = substitute(f.body(), from, to);
      if (body == f.body()) return f;
      return Formula::quantifier(f.kind(), q, std::move(body));
    }
    default: {
      std::vector<Formula> kids;
      kids.reserve(f.kids().size());
      bool changed = false;
      for (const auto& k : f.kids()) {
        kids.push_back(substitute(k, from, to));
        changed = changed || !(kids.back() == k);
      }
      if (!changed) return f;
      switch (f.kind()) {
        case FormulaKind::Not:
          return Formula::negation(std::move(kids[0]));
        case FormulaKind::And:
          return Formula::conjunction(std::move(kids));
        case FormulaKind::Or:
          return Formula::disjunction(std::move(kids));
        default:
          return Formula::implication(std::move(kids[0]), std::move(kids[1]));
      }
    }
  }
}

Formula substituteVar(const Formula& f, const std::string& var, const Term& to) {
  return substitute(f, Term::var(var), to);
}

// ---------------------------------------------------------------------------
// Simplifying constructors

Formula mkCmp(FormulaKind op, Term lhs, Term rhs) {
  lhs = trim::simplify(lhs);
  rhs = trim::simplify(rhs);
  auto decide = [op](Int diff) {
    switch (op) {
      case FormulaKind::Lt:
        return diff < 0;
      case FormulaKind::Gt:
        return diff > 0;
      default:
        return diff == 0;
    }
  };
  if (lhs == rhs) return Formula::boolean(op == FormulaKind::Eq);
  auto l = LinearForm::of(lhs);
  auto r = LinearForm::of(rhs);
  if (l && r) {
    if (auto d = l->minus(*r); d && d->isConstant()) return Formula::boolean(decide(d->constant()));
  }
  if (op == FormulaKind::Eq && rhs < lhs) std::swap(lhs, rhs);
  return Formula::cmp(op, std::move(lhs), std::move(rhs));
}

Formula mkNot(const Formula& f) {
  switch (f.kind()) {
    case FormulaKind::True:
      return Formula::falsity();
    case FormulaKind::False:
      return Formula::truth();
    case FormulaKind::Not:
      return f.kid();
    case FormulaKind::And: {
      std::vector<Formula> kids;
      for (const auto& k : f.kids()) kids.push_back(mkNot(k));
      return mkOr(std::move(kids));
    }
    case FormulaKind::Or: {
      std::vector<Formula> kids;
      for (const auto& k : f.kids()) kids.push_back(mkNot(k));
      return mkAnd(std::move(kids));
    }
    case FormulaKind::Implies:
      return mkAnd(f.kid(0), mkNot(f.kid(1)));
    case FormulaKind::Forall:
      return Formula::exists(f.boundVar(), mkNot(f.body()));
    case FormulaKind::Exists:
      return Formula::forall(f.boundVar(), mkNot(f.body()));
    default:
      return Formula::negation(f);
  }
}

namespace {

bool isLiteral(const Formula& f) {
  return f.isAtom() || (f.is(FormulaKind::Not) && f.kid().isAtom());
}

Formula mkJunction(FormulaKind kind, std::vector<Formula> in);
Formula quantify(FormulaKind kind, const std::string& q, const Formula& body);

// `f` simplified under the assumption that literal `lit` has truth value `value`.
Formula assuming(const Formula& f, const Formula& lit, bool value) {
  if (f == lit) return Formula::boolean(value);
  const Formula neg = lit.is(FormulaKind::Not) ? lit.kid() : Formula::negation(lit);
  if (f == neg) return Formula::boolean(!value);
  switch (f.kind()) {
    case FormulaKind::Not:
      if (f.kid().isAtom()) return f;
      return mkNot(assuming(f.kid(), lit, value));
    case FormulaKind::And:
    case FormulaKind::Or: {
      std::vector<Formula> kids;
      bool changed = false;
      for (const auto& k : f.kids()) {
        kids.push_back(assuming(k, lit, value));
        changed = changed || !(kids.back() == k);
      }
      return changed ? mkJunction(f.kind(), std::move(kids)) : f;
    }
    case FormulaKind::Implies: {
      Formula a = assuming(f.kid(0), lit, value);
      Formula b = assuming(f.kid(1), lit, value);
      if (a == f.kid(0) && b == f.kid(1)) return f;
      return mkImplies(a, b);
    }
    case FormulaKind::Forall:
    case FormulaKind::Exists: {
      if (mentions(lit, f.boundVar())) return f;
      Formula b = assuming(f.body(), lit, value);
      if (b == f.body()) return f;
      return quantify(f.kind(), f.boundVar(), b);
    }
    default:
      return f;
  }
}

Formula mkJunction(FormulaKind kind, std::vector<Formula> in) {
  const bool isAnd = kind == FormulaKind::And;
  const Formula unit = Formula::boolean(isAnd);
  const Formula zero = Formula::boolean(!isAnd);
  std::vector<Formula> flat;
  std::set<Formula> seen;
  auto push = [&](const Formula& k) -> bool {
    if (k == unit) return true;
    if (k == zero) return false;
    if (seen.insert(k).second) flat.push_back(k);
    return true;
  };
  for (const auto& k : in) {
    if (k.is(kind)) {
      for (const auto& g : k.kids())
        if (!push(g)) return zero;
    } else if (!push(k)) {
      return zero;
    }
  }
  for (const auto& k : flat) {
    if (k.is(FormulaKind::Not) && seen.count(k.kid())) return zero;
  }
  if (flat.empty()) return unit;
  if (flat.size() == 1) return flat.front();

  std::vector<Formula> lits;
  for (const auto& k : flat)
    if (isLiteral(k)) lits.push_back(k);
  if (!lits.empty() && lits.size() < flat.size()) {
    bool changed = false;
    for (auto& k : flat) {
      if (isLiteral(k)) continue;
      Formula g = k;
      for (const auto& l : lits) g = assuming(g, l, isAnd);
      if (!(g == k)) {
        k = g;
        changed = true;
      }
    }
    if (changed) return mkJunction(kind, std::move(flat));
  }
  return isAnd ? Formula::conjunction(std::move(flat)) : Formula::disjunction(std::move(flat));
}

// Quantifies `body` over an already-fresh binder `q`.
Formula quantify(FormulaKind kind, const std::string& q, const Formula& body) {
  if (!mentions(body, q)) return body;
  const bool isForall = kind == FormulaKind::Forall;
  const FormulaKind distributes = isForall ? FormulaKind::And : FormulaKind::Or;
  const FormulaKind scopes = isForall ? FormulaKind::Or : FormulaKind::And;

  if (body.is(distributes)) {
    std::vector<Formula> kids;
    for (const auto& k : body.kids()) kids.push_back(quantify(kind, q, k));
    return mkJunction(distributes, std::move(kids));
  }

  std::vector<Formula> parts;
  if (body.is(scopes)) {
    parts = body.kids();
  } else if (isForall && body.is(FormulaKind::Implies)) {
    parts = {mkNot(body.kid(0)), body.kid(1)};
    if (parts[1].is(FormulaKind::Or)) {
      parts.pop_back();
      for (const auto& k : body.kid(1).kids()) parts.push_back(k);
    }
  }
  if (!parts.empty()) {
    std::vector<Formula> independent, dependent;
    for (const auto& p : parts) (mentions(p, q) ? dependent : independent).push_back(p);
    if (!independent.empty()) {
      independent.push_back(quantify(kind, q, mkJunction(scopes, std::move(dependent))));
      return mkJunction(scopes, std::move(independent));
    }
  }

  if (isForall && !hasQuantifier(body)) {
    if (auto witnessFree = eliminateExistsExact(q, toNnf(mkNot(body)))) return mkNot(*witnessFree);
  }
  return Formula::quantifier(kind, q, body);
}

}  // namespace

Formula mkAnd(std::vector<Formula> kids) { return mkJunction(FormulaKind::And, std::move(kids)); }
Formula mkAnd(const Formula& a, const Formula& b) { return mkAnd(std::vector<Formula>{a, b}); }
Formula mkOr(std::vector<Formula> kids) { return mkJunction(FormulaKind::Or, std::move(kids)); }
Formula mkOr(const Formula& a, const Formula& b) { return mkOr(std::vector<Formula>{a, b}); }

Formula mkImplies(const Formula& a, const Formula& b) {
  if (a.isTrue()) return b;
  if (a.isFalse() || b.isTrue()) return Formula::truth();
  if (b.isFalse()) return mkNot(a);
  if (a == b) return Formula::truth();
  if (isLiteral(a) || (a.is(FormulaKind::And) &&
                       std::all_of(a.kids().begin(), a.kids().end(), isLiteral))) {
    Formula g = b;
    if (isLiteral(a)) {
      g = assuming(g, a, true);
    } else {
      for (const auto& l : a.kids()) g = assuming(g, l, true);
    }
    if (!(g == b)) return mkImplies(a, g);
  }
  if (b.is(FormulaKind::And)) {
    // p => (p && q) is p => q
    const auto& ks = b.kids();
    if (std::find(ks.begin(), ks.end(), a) != ks.end()) {
      std::vector<Formula> rest;
      for (const auto& k : ks)
        if (!(k == a)) rest.push_back(k);
      return mkImplies(a, mkAnd(std::move(rest)));
    }
  }
  if (b.is(FormulaKind::Or)) {
    const auto& ks = b.kids();
    if (std::find(ks.begin(), ks.end(), a) != ks.end()) return Formula::truth();
  }
  return Formula::implication(a, b);
}

Formula mkForall(const std::string& var, const Formula& body) {
  if (!mentions(body, var)) return body;
  std::set<std::string> avoid = allNames(body);
  std::string q = freshName(avoid);
  return quantify(FormulaKind::Forall, q, substituteVar(body, var, Term::var(q)));
}

Formula mkExists(const std::string& var, const Formula& body) {
  if (!mentions(body, var)) return body;
  std::set<std::string> avoid = allNames(body);
  std::string q = freshName(avoid);
  return quantify(FormulaKind::Exists, q, substituteVar(body, var, Term::var(q)));
}

Formula simplify(const Formula& f) {
  switch (f.kind()) {
    case FormulaKind::True:
    case FormulaKind::False:
      return f;
    case FormulaKind::Lt:
    case FormulaKind::Gt:
    case FormulaKind::Eq:
      return mkCmp(f.kind(), f.lhsTerm(), f.rhsTerm());
    case FormulaKind::Not:
      return mkNot(simplify(f.kid()));
    case FormulaKind::And:
    case FormulaKind::Or: {
      std::vector<Formula> kids;
      for (const auto& k : f.kids()) kids.push_back(simplify(k));
      return mkJunction(f.kind(), std::move(kids));
    }
    case FormulaKind::Implies:
      return mkImplies(simplify(f.kid(0)), simplify(f.kid(1)));
    case FormulaKind::Forall:
    case FormulaKind::Exists:
      return quantify(f.kind(), f.boundVar(), simplify(f.body()));
  }
  return f;
}

Formula toNnf(const Formula& f) {
  switch (f.kind()) {
    case FormulaKind::Not: {
      const Formula& k = f.kid();
      if (k.isAtom()) return f;
      if (k.is(FormulaKind::Not)) return toNnf(k.kid());
      return toNnf(mkNot(k));
    }
    case FormulaKind::And:
    case FormulaKind::Or: {
      std::vector<Formula> kids;
      for (const auto& k : f.kids()) kids.push_back(toNnf(k));
      return mkJunction(f.kind(), std::move(kids));
    }
    case FormulaKind::Implies:
      return mkOr(toNnf(mkNot(f.kid(0))), toNnf(f.kid(1)));
    case FormulaKind::Forall:
    case FormulaKind::Exists:
      return Formula::quantifier(f.kind(), f.boundVar(), toNnf(f.body()));
    default:
      return f;
  }
}

}  // namespace trim
