// Copyright 2026 The curvcheck Authors
// SPDX-License-Identifier: Apache-2.0

#include "curvcheck/expr.hpp"

#include <algorithm>
#include <deque>
#include <shared_mutex>
#include <unordered_map>

namespace curvcheck {

// ---------------------------------------------------------------------------
// Atom registry
// ---------------------------------------------------------------------------

namespace {

struct AtomRegistry {
  std::shared_mutex mu;
  std::deque<AtomData> atoms;
  std::unordered_map<std::string, AtomId> by_key;

  AtomId intern(AtomData d) {
    {
      std::shared_lock lk(mu);
      if (auto it = by_key.find(d.key); it != by_key.end()) return it->second;
    }
    std::unique_lock lk(mu);
    if (auto it = by_key.find(d.key); it != by_key.end()) return it->second;
    AtomId id = static_cast<AtomId>(atoms.size());
    by_key.emplace(d.key, id);
    atoms.push_back(std::move(d));
    return id;
  }
};

AtomRegistry& registry() {
  static AtomRegistry* r = new AtomRegistry;
  return *r;
}

}  // namespace

const AtomData& atom_data(AtomId id) {
  auto& r = registry();
  std::shared_lock lk(r.mu);
  return r.atoms[id];
}

AtomId intern_symbol(const std::string& name) {
  AtomData d;
  d.kind = AtomKind::Symbol;
  d.name = name;
  d.key = "s|" + name;
  return registry().intern(std::move(d));
}

AtomId intern_trig(bool is_sin, const Expr& arg) {
  AtomData d;
  d.kind = is_sin ? AtomKind::Sin : AtomKind::Cos;
  d.arg = std::make_shared<Expr>(arg);
  d.key = std::string(is_sin ? "t|sin(" : "t|cos(") + to_string(arg) + ")";
  return registry().intern(std::move(d));
}

AtomId intern_func(const std::string& name, int order, const Expr& arg) {
  AtomData d;
  d.kind = AtomKind::Func;
  d.name = name;
  d.order = order;
  d.arg = std::make_shared<Expr>(arg);
  d.key = "f|" + name + std::string(static_cast<size_t>(order), '\'') + "(" + to_string(arg) + ")";
  return registry().intern(std::move(d));
}

AtomId intern_power(const Expr& base, const Rational& expo) {
  AtomData d;
  d.kind = AtomKind::Power;
  d.arg = std::make_shared<Expr>(base);
  d.expo = expo;
  d.key = "p|(" + to_string(base) + ")^(" + expo.str() + ")";
  return registry().intern(std::move(d));
}

int atom_compare(AtomId a, AtomId b) {
  if (a == b) return 0;
  const auto& da = atom_data(a);
  const auto& db = atom_data(b);
  int c = da.key.compare(db.key);
  return c < 0 ? -1 : (c > 0 ? 1 : 0);
}

// ---------------------------------------------------------------------------
// Monomials
// ---------------------------------------------------------------------------

int mono_compare(const Monomial& a, const Monomial& b) {
  size_t i = 0, j = 0;
  while (i < a.factors.size() && j < b.factors.size()) {
    int c = atom_compare(a.factors[i].first, b.factors[j].first);
    if (c < 0) return 1;   // a has an earlier atom with positive exponent
    if (c > 0) return -1;
    if (a.factors[i].second != b.factors[j].second)
      return a.factors[i].second > b.factors[j].second ? 1 : -1;
    ++i;
    ++j;
  }
  if (i < a.factors.size()) return 1;
  if (j < b.factors.size()) return -1;
  return 0;
}

Monomial mono_mul(const Monomial& a, const Monomial& b) {
  Monomial out;
  out.factors.reserve(a.factors.size() + b.factors.size());
  size_t i = 0, j = 0;
  while (i < a.factors.size() && j < b.factors.size()) {
    int c = atom_compare(a.factors[i].first, b.factors[j].first);
    if (c < 0) {
      out.factors.push_back(a.factors[i++]);
    } else if (c > 0) {
      out.factors.push_back(b.factors[j++]);
    } else {
      int e = a.factors[i].second + b.factors[j].second;
      if (e != 0) out.factors.emplace_back(a.factors[i].first, e);
      ++i;
      ++j;
    }
  }
  for (; i < a.factors.size(); ++i) out.factors.push_back(a.factors[i]);
  for (; j < b.factors.size(); ++j) out.factors.push_back(b.factors[j]);
  return out;
}

std::optional<Monomial> mono_div(const Monomial& a, const Monomial& b) {
  Monomial out;
  size_t i = 0, j = 0;
  while (j < b.factors.size()) {
    if (i >= a.factors.size()) return std::nullopt;
    int c = atom_compare(a.factors[i].first, b.factors[j].first);
    if (c < 0) {
      out.factors.push_back(a.factors[i++]);
    } else if (c > 0) {
      return std::nullopt;
    } else {
      int e = a.factors[i].second - b.factors[j].second;
      if (e < 0) return std::nullopt;
      if (e > 0) out.factors.emplace_back(a.factors[i].first, e);
      ++i;
      ++j;
    }
  }
  for (; i < a.factors.size(); ++i) out.factors.push_back(a.factors[i]);
  return out;
}

// ---------------------------------------------------------------------------
// Poly
// ---------------------------------------------------------------------------

Poly::Poly(Rational c) {
  if (c != 0) terms_.push_back(Term{std::move(c), Monomial{}});
}

Poly Poly::atom(AtomId id, int exp) {
  Poly p;
  if (exp == 0) return Poly(Rational(1));
  Monomial m;
  m.factors.emplace_back(id, exp);
  p.terms_.push_back(Term{Rational(1), std::move(m)});
  return p;
}

bool Poly::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_[0].mono.factors.empty());
}

const Rational& Poly::constant() const {
  static const Rational zero(0);
  return terms_.empty() ? zero : terms_[0].coeff;
}

Poly Poly::from_terms(std::vector<Term> terms) {
  Poly p;
  p.terms_ = std::move(terms);
  return p;
}

Poly operator+(const Poly& a, const Poly& b) {
  std::vector<Term> out;
  out.reserve(a.terms_.size() + b.terms_.size());
  size_t i = 0, j = 0;
  while (i < a.terms_.size() && j < b.terms_.size()) {
    int c = mono_compare(a.terms_[i].mono, b.terms_[j].mono);
    if (c > 0) {
      out.push_back(a.terms_[i++]);
    } else if (c < 0) {
      out.push_back(b.terms_[j++]);
    } else {
      Rational s = a.terms_[i].coeff + b.terms_[j].coeff;
      if (s != 0) out.push_back(Term{std::move(s), a.terms_[i].mono});
      ++i;
      ++j;
    }
  }
  for (; i < a.terms_.size(); ++i) out.push_back(a.terms_[i]);
  for (; j < b.terms_.size(); ++j) out.push_back(b.terms_[j]);
  return Poly::from_terms(std::move(out));
}

Poly Poly::operator-() const {
  std::vector<Term> out = terms_;
  for (auto& t : out) t.coeff = -t.coeff;
  return Poly::from_terms(std::move(out));
}

Poly operator-(const Poly& a, const Poly& b) { return a + (-b); }

Poly Poly::scaled(const Rational& c) const {
  if (c == 0) return Poly();
  std::vector<Term> out = terms_;
  for (auto& t : out) t.coeff *= c;
  return Poly::from_terms(std::move(out));
}

Poly operator*(const Poly& a, const Poly& b) {
  if (a.is_zero() || b.is_zero()) return Poly();
  struct MonoLess {
    bool operator()(const Monomial& x, const Monomial& y) const { return mono_compare(x, y) > 0; }
  };
  std::map<Monomial, Rational, MonoLess> acc;
  for (const auto& ta : a.terms_) {
    for (const auto& tb : b.terms_) {
      Monomial m = mono_mul(ta.mono, tb.mono);
      auto [it, fresh] = acc.emplace(std::move(m), ta.coeff * tb.coeff);
      if (!fresh) it->second += ta.coeff * tb.coeff;
    }
  }
  std::vector<Term> out;
  out.reserve(acc.size());
  for (auto& [m, c] : acc) {
    if (c != 0) out.push_back(Term{std::move(c), m});
  }
  return Poly::from_terms(std::move(out));
}

Poly Poly::pow(unsigned k) const {
  Poly result(Rational(1));
  Poly base = *this;
  while (k) {
    if (k & 1u) result = result * base;
    base = (k >>= 1) ? base * base : base;
  }
  return result;
}

std::optional<Poly> Poly::divide_exact(const Poly& num, const Poly& den) {
  if (den.is_zero()) return std::nullopt;
  if (num.is_zero()) return Poly();
  std::vector<Term> quotient;
  Poly rem = num;
  const Term& dlead = den.leading();
  while (!rem.is_zero()) {
    auto m = mono_div(rem.leading().mono, dlead.mono);
    if (!m) return std::nullopt;
    Term t{rem.leading().coeff / dlead.coeff, *m};
    Poly tp = Poly::from_terms({t});
    rem = rem - tp * den;
    quotient.push_back(std::move(t));
  }
  // quotient terms were produced in strictly decreasing order already
  return Poly::from_terms(std::move(quotient));
}

int Poly::compare(const Poly& a, const Poly& b) {
  size_t i = 0;
  for (; i < a.terms_.size() && i < b.terms_.size(); ++i) {
    int c = mono_compare(a.terms_[i].mono, b.terms_[i].mono);
    if (c != 0) return c;
    if (a.terms_[i].coeff != b.terms_[i].coeff)
      return a.terms_[i].coeff < b.terms_[i].coeff ? -1 : 1;
  }
  if (i < a.terms_.size()) return 1;
  if (i < b.terms_.size()) return -1;
  return 0;
}

Poly Poly::trig_reduced() const {
  Poly acc;
  for (const auto& t : terms_) {
    Poly piece(t.coeff);
    Monomial rest;
    for (const auto& [id, exp] : t.mono.factors) {
      const AtomData& d = atom_data(id);
      if (d.kind == AtomKind::Sin && exp >= 2) {
        AtomId cid = intern_trig(false, *d.arg);
        Poly one_minus_cos2 = Poly(Rational(1)) - Poly::atom(cid, 2);
        piece = piece * one_minus_cos2.pow(static_cast<unsigned>(exp / 2));
        if (exp % 2) piece = piece * Poly::atom(id, 1);
      } else {
        rest.factors.emplace_back(id, exp);
      }
    }
    if (!rest.factors.empty()) piece = piece * Poly::from_terms({Term{Rational(1), rest}});
    acc = acc + piece;
  }
  return acc;
}

// ---------------------------------------------------------------------------
// RationalFn
// ---------------------------------------------------------------------------

namespace {

// monic scaling: returns the leading coefficient that was divided out
Rational make_monic(Poly& p) {
  Rational lead = p.leading().coeff;
  p = p.scaled(Rational(1) / lead);
  return lead;
}

void sort_factors(std::vector<DenFactor>& den) {
  std::sort(den.begin(), den.end(), [](const DenFactor& a, const DenFactor& b) {
    return Poly::compare(a.base, b.base) < 0;
  });
  // merge equal bases
  std::vector<DenFactor> merged;
  for (auto& f : den) {
    if (!merged.empty() && Poly::compare(merged.back().base, f.base) == 0) {
      merged.back().exp += f.exp;
    } else {
      merged.push_back(std::move(f));
    }
  }
  den = std::move(merged);
}

}  // namespace

RationalFn::RationalFn(Poly num, std::vector<DenFactor> den) : num_(std::move(num)) {
  Rational scale(1);
  for (auto& f : den) {
    if (f.base.is_zero() || f.base.trig_reduced().is_zero())
      throw DivisionByZero("division by symbolically zero expression");
    if (f.base.is_constant()) {
      Rational c = f.base.constant();
      for (int i = 0; i < f.exp; ++i) scale *= c;
      continue;
    }
    Rational lead = make_monic(f.base);
    for (int i = 0; i < f.exp; ++i) scale *= lead;
    den_.push_back(std::move(f));
  }
  if (scale != 1) num_ = num_.scaled(Rational(1) / scale);
  sort_factors(den_);
  cancel();
}

void RationalFn::cancel() {
  if (num_.is_zero()) {
    den_.clear();
    return;
  }
  for (auto& f : den_) {
    while (f.exp > 0) {
      auto q = Poly::divide_exact(num_, f.base);
      if (!q) break;
      num_ = std::move(*q);
      --f.exp;
      if (num_.is_zero()) break;
    }
  }
  den_.erase(std::remove_if(den_.begin(), den_.end(), [](const DenFactor& f) { return f.exp == 0; }),
             den_.end());
  if (num_.is_zero()) den_.clear();
}

RationalFn operator+(const RationalFn& a, const RationalFn& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  // common denominator: per factor, max multiplicity
  std::vector<DenFactor> common = a.den_;
  for (const auto& fb : b.den_) {
    bool found = false;
    for (auto& fc : common) {
      if (Poly::compare(fc.base, fb.base) == 0) {
        fc.exp = std::max(fc.exp, fb.exp);
        found = true;
        break;
      }
    }
    if (!found) common.push_back(fb);
  }
  sort_factors(common);
  auto complement = [&common](const std::vector<DenFactor>& own) {
    Poly c(Rational(1));
    for (const auto& f : common) {
      int have = 0;
      for (const auto& o : own)
        if (Poly::compare(o.base, f.base) == 0) have = o.exp;
      if (f.exp > have) c = c * f.base.pow(static_cast<unsigned>(f.exp - have));
    }
    return c;
  };
  Poly num = a.num_ * complement(a.den_) + b.num_ * complement(b.den_);
  RationalFn out;
  out.num_ = std::move(num);
  out.den_ = std::move(common);
  out.cancel();
  return out;
}

RationalFn RationalFn::operator-() const {
  RationalFn out = *this;
  out.num_ = -out.num_;
  return out;
}

RationalFn operator-(const RationalFn& a, const RationalFn& b) { return a + (-b); }

RationalFn operator*(const RationalFn& a, const RationalFn& b) {
  RationalFn out;
  out.num_ = a.num_ * b.num_;
  out.den_ = a.den_;
  out.den_.insert(out.den_.end(), b.den_.begin(), b.den_.end());
  sort_factors(out.den_);
  out.cancel();
  return out;
}

RationalFn RationalFn::inverse() const {
  if (num_.is_zero()) throw DivisionByZero("inverse of zero expression");
  Poly newnum(Rational(1));
  for (const auto& f : den_) newnum = newnum * f.base.pow(static_cast<unsigned>(f.exp));
  std::vector<DenFactor> newden;
  newden.push_back(DenFactor{num_, 1});
  return RationalFn(std::move(newnum), std::move(newden));
}

RationalFn operator/(const RationalFn& a, const RationalFn& b) { return a * b.inverse(); }

RationalFn RationalFn::pow(long k) const {
  if (k == 0) return RationalFn(Poly(Rational(1)));
  if (k < 0) return inverse().pow(-k);
  RationalFn out;
  out.num_ = num_.pow(static_cast<unsigned>(k));
  out.den_ = den_;
  for (auto& f : out.den_) f.exp = static_cast<int>(f.exp * k);
  out.cancel();
  return out;
}

int RationalFn::compare(const RationalFn& a, const RationalFn& b) {
  int c = Poly::compare(a.num_, b.num_);
  if (c != 0) return c;
  size_t i = 0;
  for (; i < a.den_.size() && i < b.den_.size(); ++i) {
    c = Poly::compare(a.den_[i].base, b.den_[i].base);
    if (c != 0) return c;
    if (a.den_[i].exp != b.den_[i].exp) return a.den_[i].exp < b.den_[i].exp ? -1 : 1;
  }
  if (i < a.den_.size()) return 1;
  if (i < b.den_.size()) return -1;
  return 0;
}

}  // namespace curvcheck
