#include "trim/linear.hpp"

#include "trim/arith.hpp"

namespace trim {

Int LinearForm::coeff(const Term& atom) const {
  auto it = coeffs_.find(atom);
  return it == coeffs_.end() ? 0 : it->second;
}

std::optional<LinearForm> LinearForm::plus(const LinearForm& other) const {
  LinearForm out = *this;
  auto c = applyArith(TermKind::Add, constant_, other.constant_);
  if (!c) return std::nullopt;
  out.constant_ = *c;
  for (const auto& [atom, k] : other.coeffs_) {
    auto sum = applyArith(TermKind::Add, out.coeff(atom), k);
    if (!sum) return std::nullopt;
    if (*sum == 0)
      out.coeffs_.erase(atom);
    else
      out.coeffs_[atom] = *sum;
  }
  return out;
}

std::optional<LinearForm> LinearForm::scaled(Int factor) const {
  LinearForm out;
  if (factor == 0) return out;
  auto c = applyArith(TermKind::Mul, constant_, factor);
  if (!c) return std::nullopt;
  out.constant_ = *c;
  for (const auto& [atom, k] : coeffs_) {
    auto p = applyArith(TermKind::Mul, k, factor);
    if (!p) return std::nullopt;
    out.coeffs_[atom] = *p;
  }
  return out;
}

std::optional<LinearForm> LinearForm::minus(const LinearForm& other) const {
  auto neg = other.scaled(-1);
  if (!neg) return std::nullopt;
  return plus(*neg);
}

LinearForm LinearForm::without(const Term& atom) const {
  LinearForm out = *this;
  out.coeffs_.erase(atom);
  return out;
}

std::optional<LinearForm> LinearForm::of(const Term& t) {
  switch (t.kind()) {
    case TermKind::Const:
      return LinearForm(t.value());
    case TermKind::Var:
    case TermKind::Drf: {
      LinearForm out;
      out.coeffs_[t] = 1;
      return out;
    }
    case TermKind::Add:
    case TermKind::Sub: {
      auto l = of(t.lhs());
      auto r = of(t.rhs());
      if (!l || !r) return std::nullopt;
      return t.kind() == TermKind::Add ? l->plus(*r) : l->minus(*r);
    }
    case TermKind::Mul: {
      auto l = of(t.lhs());
      auto r = of(t.rhs());
      if (!l || !r) return std::nullopt;
      if (l->isConstant()) return r->scaled(l->constant());
      if (r->isConstant()) return l->scaled(r->constant());
      LinearForm out;
      out.coeffs_[t] = 1;
      return out;
    }
  }
  return std::nullopt;
}

Term LinearForm::toTerm() const {
  Term acc;
  auto append = [&acc](Term piece, bool negative) {
    if (!acc.valid()) {
      acc = negative ? Term::sub(Term::constant(0), piece) : piece;
      if (negative && piece.isConst()) acc = Term::constant(-piece.value());
      return;
    }
    acc = negative ? Term::sub(acc, piece) : Term::add(acc, piece);
  };
  auto scaledAtom = [](const Term& atom, Int k) {
    return k == 1 ? atom : Term::mul(Term::constant(k), atom);
  };
  for (const auto& [atom, k] : coeffs_)
    if (k > 0) append(scaledAtom(atom, k), false);
  for (const auto& [atom, k] : coeffs_)
    if (k < 0) append(scaledAtom(atom, -k), true);
  if (!acc.valid()) return Term::constant(constant_);
  if (constant_ > 0) append(Term::constant(constant_), false);
  if (constant_ < 0) append(Term::constant(-constant_), true);
  return acc;
}

}  // namespace trim
