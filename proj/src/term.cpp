#include "trim/term.hpp"

#include <cassert>
#include <stdexcept>

#include "trim/arith.hpp"

namespace trim {

struct Term::Node {
  TermKind kind;
  std::string name;
  Int value = 0;
  Term a;
  Term b;
  std::size_t size = 1;
};

Term Term::var(std::string name) {
  return Term(std::make_shared<const Node>(Node{TermKind::Var, std::move(name), 0, {}, {}, 1}));
}

Term Term::constant(Int value) {
  return Term(std::make_shared<const Node>(Node{TermKind::Const, {}, value, {}, {}, 1}));
}

Term Term::binary(TermKind kind, Term lhs, Term rhs) {
  assert(kind == TermKind::Add || kind == TermKind::Sub || kind == TermKind::Mul);
  std::size_t size = 1 + lhs.size() + rhs.size();
  return Term(std::make_shared<const Node>(Node{kind, {}, 0, std::move(lhs), std::move(rhs), size}));
}

Term Term::add(Term lhs, Term rhs) { return binary(TermKind::Add, std::move(lhs), std::move(rhs)); }
Term Term::sub(Term lhs, Term rhs) { return binary(TermKind::Sub, std::move(lhs), std::move(rhs)); }
Term Term::mul(Term lhs, Term rhs) { return binary(TermKind::Mul, std::move(lhs), std::move(rhs)); }

Term Term::drf(Term location) {
  std::size_t size = 1 + location.size();
  return Term(std::make_shared<const Node>(Node{TermKind::Drf, {}, 0, std::move(location), {}, size}));
}

TermKind Term::kind() const { return node_->kind; }
const std::string& Term::name() const { return node_->name; }
Int Term::value() const { return node_->value; }
const Term& Term::lhs() const { return node_->a; }
const Term& Term::rhs() const { return node_->b; }
std::size_t Term::size() const { return node_ ? node_->size : 0; }

bool Term::isArith() const {
  if (!valid()) return false;
  auto k = kind();
  return k == TermKind::Add || k == TermKind::Sub || k == TermKind::Mul;
}

bool operator==(const Term& a, const Term& b) { return (a <=> b) == 0; }

std::strong_ordering operator<=>(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return std::strong_ordering::equal;
  if (!a.node_) return std::strong_ordering::less;
  if (!b.node_) return std::strong_ordering::greater;
  if (auto c = a.kind() <=> b.kind(); c != 0) return c;
  switch (a.kind()) {
    case TermKind::Var:
      return a.name().compare(b.name()) <=> 0;
    case TermKind::Const:
      return a.value() <=> b.value();
    case TermKind::Drf:
      return a.operand() <=> b.operand();
    default:
      if (auto c = a.lhs() <=> b.lhs(); c != 0) return c;
      return a.rhs() <=> b.rhs();
  }
}

namespace {

int precedence(TermKind k) {
  switch (k) {
    case TermKind::Add:
    case TermKind::Sub:
      return 1;
    case TermKind::Mul:
      return 2;
    default:
      return 3;
  }
}

void print(const Term& t, std::string& out) {
  switch (t.kind()) {
    case TermKind::Var:
      out += t.name();
      return;
    case TermKind::Const:
      out += std::to_string(t.value());
      return;
    case TermKind::Drf:
      out += "drf(";
      print(t.operand(), out);
      out += ")";
      return;
    default:
      break;
  }
  int p = precedence(t.kind());
  bool leftParens = precedence(t.lhs().kind()) < p;
  bool rightParens = precedence(t.rhs().kind()) <= p;
  if (leftParens) out += "(";
  print(t.lhs(), out);
  if (leftParens) out += ")";
  out += t.kind() == TermKind::Add ? " + " : t.kind() == TermKind::Sub ? " - " : " * ";
  if (rightParens) out += "(";
  print(t.rhs(), out);
  if (rightParens) out += ")";
}

}  // namespace

std::string toString(const Term& t) {
  if (!t.valid()) return "<null>";
  std::string out;
  print(t, out);
  return out;
}

void collectVars(const Term& t, std::set<std::string>& out) {
  switch (t.kind()) {
    case TermKind::Var:
      out.insert(t.name());
      return;
    case TermKind::Const:
      return;
    case TermKind::Drf:
      collectVars(t.operand(), out);
      return;
    default:
      collectVars(t.lhs(), out);
      collectVars(t.rhs(), out);
  }
}

std::set<std::string> freeVars(const Term& t) {
  std::set<std::string> out;
  collectVars(t, out);
  return out;
}

bool mentions(const Term& t, const std::string& var) {
  switch (t.kind()) {
    case TermKind::Var:
      return t.name() == var;
    case TermKind::Const:
      return false;
    case TermKind::Drf:
      return mentions(t.operand(), var);
    default:
      return mentions(t.lhs(), var) || mentions(t.rhs(), var);
  }
}

bool contains(const Term& haystack, const Term& needle) {
  if (haystack == needle) return true;
  switch (haystack.kind()) {
    case TermKind::Var:
    case TermKind::Const:
      return false;
    case TermKind::Drf:
      return contains(haystack.operand(), needle);
    default:
      return contains(haystack.lhs(), needle) || contains(haystack.rhs(), needle);
  }
}

void collectDerefs(const Term& t, std::set<Term>& out) {
  switch (t.kind()) {
    case TermKind::Var:
    case TermKind::Const:
      return;
    case TermKind::Drf:
      out.insert(t.operand());
      collectDerefs(t.operand(), out);
      return;
    default:
      collectDerefs(t.lhs(), out);
      collectDerefs(t.rhs(), out);
  }
}

Term substitute(const Term& t, const Term& from, const Term& to) {
  if (t == from) return to;
  switch (t.kind()) {
    case TermKind::Var:
    case TermKind::Const:
      return t;
    case TermKind::Drf: {
      Term inner = substitute(t.operand(), from, to);
      return inner == t.operand() ? t : Term::drf(std::move(inner));
    }
    default: {
      Term l = substitute(t.lhs(), from, to);
      Term r = substitute(t.rhs(), from, to);
      if (l == t.lhs() && r == t.rhs()) return t;
      return Term::binary(t.kind(), std::move(l), std::move(r));
    }
  }
}

Term simplify(const Term& t) {
  switch (t.kind()) {
    case TermKind::Var:
    case TermKind::Const:
      return t;
    case TermKind::Drf:
      return Term::drf(simplify(t.operand()));
    default:
      break;
  }
  Term l = simplify(t.lhs());
  Term r = simplify(t.rhs());
  if (l.isConst() && r.isConst()) {
    if (auto v = applyArith(t.kind(), l.value(), r.value())) return Term::constant(*v);
  }
  switch (t.kind()) {
    case TermKind::Add:
      if (l.isConst() && l.value() == 0) return r;
      if (r.isConst() && r.value() == 0) return l;
      break;
    case TermKind::Sub:
      if (r.isConst() && r.value() == 0) return l;
      if (l == r) return Term::constant(0);
      break;
    case TermKind::Mul:
      if ((l.isConst() && l.value() == 0) || (r.isConst() && r.value() == 0)) return Term::constant(0);
      if (l.isConst() && l.value() == 1) return r;
      if (r.isConst() && r.value() == 1) return l;
      break;
    default:
      break;
  }
  return Term::binary(t.kind(), std::move(l), std::move(r));
}

std::optional<Int> applyArith(TermKind op, Int a, Int b, IntMode mode) {
  Int result = 0;
  bool overflow = false;
  switch (op) {
    case TermKind::Add:
      overflow = __builtin_add_overflow(a, b, &result);
      break;
    case TermKind::Sub:
      overflow = __builtin_sub_overflow(a, b, &result);
      break;
    case TermKind::Mul:
      overflow = __builtin_mul_overflow(a, b, &result);
      break;
    default:
      throw std::logic_error("applyArith: not an arithmetic operator");
  }
  if (mode == IntMode::Wrap32) {
    // Operands are 32-bit values, so the 64-bit result is exact before wrapping.
    return wrap32(result);
  }
  if (overflow) return std::nullopt;
  return result;
}

}  // namespace trim
