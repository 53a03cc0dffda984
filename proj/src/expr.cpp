// Copyright 2026 The curvcheck Authors
// SPDX-License-Identifier: Apache-2.0

#include "curvcheck/expr.hpp"

#include <algorithm>
#include <cmath>

namespace curvcheck {

AtomId intern_trig(bool is_sin, const Expr& arg);
AtomId intern_func(const std::string& name, int order, const Expr& arg);
AtomId intern_power(const Expr& base, const Rational& expo);

namespace {

std::shared_ptr<ExprNode> make_node(ExprKind k) {
  auto n = std::make_shared<ExprNode>();
  n->kind = k;
  return n;
}

bool is_integer(const Rational& q) { return boost::multiprecision::denominator(q) == 1; }

long to_long(const Rational& q) {
  return static_cast<long>(boost::multiprecision::numerator(q).convert_to<long long>());
}

}  // namespace

Expr::Expr() {
  auto n = make_node(ExprKind::Const);
  n->cval = 0;
  n->canonical = true;
  node_ = std::move(n);
}

Expr Expr::constant(Rational c) {
  auto n = make_node(ExprKind::Const);
  n->cval = std::move(c);
  return Expr(std::move(n));
}

Expr Expr::integer(long long v) { return constant(Rational(v)); }

Expr Expr::symbol(const std::string& name) {
  auto n = make_node(ExprKind::Sym);
  n->sym = intern_symbol(name);
  return Expr(std::move(n));
}

Expr Expr::func(const std::string& name, const Expr& arg, int order) {
  auto n = make_node(ExprKind::Func);
  n->fname = name;
  n->forder = order;
  n->kids.push_back(arg);
  return Expr(std::move(n));
}

ExprKind Expr::kind() const { return node_->kind; }

Expr operator+(const Expr& a, const Expr& b) {
  auto n = make_node(ExprKind::Add);
  n->kids = {a, b};
  return Expr(std::move(n));
}

Expr operator-(const Expr& a, const Expr& b) { return a + (-b); }

Expr Expr::operator-() const { return Expr::integer(-1) * *this; }

Expr operator*(const Expr& a, const Expr& b) {
  auto n = make_node(ExprKind::Mul);
  n->kids = {a, b};
  return Expr(std::move(n));
}

Expr operator/(const Expr& a, const Expr& b) { return a * b.pow(-1); }

Expr Expr::pow(const Rational& e) const {
  auto n = make_node(ExprKind::Pow);
  n->expo = e;
  n->kids = {*this};
  return Expr(std::move(n));
}

Expr Expr::pow(long e) const { return pow(Rational(e)); }

Expr sin(const Expr& x) {
  auto n = make_node(ExprKind::Sin);
  n->kids = {x};
  return Expr(std::move(n));
}

Expr cos(const Expr& x) {
  auto n = make_node(ExprKind::Cos);
  n->kids = {x};
  return Expr(std::move(n));
}

// ---------------------------------------------------------------------------
// Canonicalization
// ---------------------------------------------------------------------------

namespace {

Expr atom_to_expr(AtomId id) {
  const AtomData& d = atom_data(id);
  switch (d.kind) {
    case AtomKind::Symbol: {
      auto n = make_node(ExprKind::Sym);
      n->sym = id;
      return Expr(std::move(n));
    }
    case AtomKind::Sin:
      return sin(*d.arg);
    case AtomKind::Cos:
      return cos(*d.arg);
    case AtomKind::Func:
      return Expr::func(d.name, *d.arg, d.order);
    case AtomKind::Power:
      return d.arg->pow(d.expo);
  }
  throw SymbolicError("corrupt atom");
}

Expr rational_fn_to_expr(const RationalFn& rf);

// sin/cos of a canonical argument with the product-form convention:
// integer-linear combinations of primitive angles are expanded through the
// angle-addition identities, so e.g. sin(2*theta) becomes 2*sin(theta)*cos(theta).
struct AnglePart {
  long count = 0;        // signed integer multiplicity
  AtomId atom = 0;       // primitive angle atom
  bool is_const = false; // constant part instead of an atom
  Rational cval;
};

constexpr long kMaxAngleUnits = 16;

std::optional<std::vector<AnglePart>> decompose_angle(const RationalFn& rf) {
  if (!rf.is_polynomial()) return std::nullopt;
  std::vector<AnglePart> parts;
  long units = 0;
  for (const auto& t : rf.num().terms()) {
    if (t.mono.factors.empty()) {
      AnglePart p;
      p.is_const = true;
      p.cval = t.coeff;
      p.count = 1;
      parts.push_back(std::move(p));
      units += 1;
      continue;
    }
    if (t.mono.factors.size() != 1 || t.mono.factors[0].second != 1) return std::nullopt;
    if (!is_integer(t.coeff)) return std::nullopt;
    AnglePart p;
    p.count = to_long(t.coeff);
    p.atom = t.mono.factors[0].first;
    units += std::abs(p.count);
    if (units > kMaxAngleUnits) return std::nullopt;
    parts.push_back(std::move(p));
  }
  return parts;
}

// one primitive angle unit as (sin, cos) rational forms
std::pair<RationalFn, RationalFn> primitive_trig(const AnglePart& p, bool negate) {
  if (p.is_const && p.cval < 0) {
    AnglePart q = p;
    q.cval = -q.cval;
    return primitive_trig(q, !negate);
  }
  Expr arg = p.is_const ? Expr::constant(p.cval) : atom_to_expr(p.atom);
  RationalFn s(Poly::atom(intern_trig(true, arg)));
  RationalFn c(Poly::atom(intern_trig(false, arg)));
  if (negate) s = -s;
  return {std::move(s), std::move(c)};
}

std::pair<RationalFn, RationalFn> expand_angle(std::vector<AnglePart> parts) {
  // returns (sin, cos) of the sum of parts
  // take one unit off the first part
  AnglePart& head = parts.front();
  bool neg = head.count < 0;
  std::pair<RationalFn, RationalFn> u = primitive_trig(head, neg);
  head.count += neg ? 1 : -1;
  if (head.count == 0) parts.erase(parts.begin());
  if (parts.empty()) return u;
  auto v = expand_angle(std::move(parts));
  RationalFn s = u.first * v.second + u.second * v.first;
  RationalFn c = u.second * v.second - u.first * v.first;
  return {std::move(s), std::move(c)};
}

RationalFn fold_trig(bool is_sin, const RationalFn& arg) {
  if (arg.is_zero()) return RationalFn(Poly(Rational(is_sin ? 0 : 1)));
  auto parts = decompose_angle(arg);
  if (parts && !parts->empty()) {
    auto sc = expand_angle(std::move(*parts));
    return is_sin ? sc.first : sc.second;
  }
  // atomic angle: normalize sign so sin(-u) = -sin(u), cos(-u) = cos(u)
  bool neg = arg.num().leading().coeff < 0;
  Expr argx = rational_fn_to_expr(neg ? -arg : arg);
  RationalFn out(Poly::atom(intern_trig(is_sin, argx)));
  if (neg && is_sin) out = -out;
  return out;
}

RationalFn fold_pow(const RationalFn& base, const Rational& expo) {
  if (is_integer(expo)) return base.pow(to_long(expo));
  // non-integer exponent: collapse power-of-power, otherwise an opaque atom
  const Poly& n = base.num();
  if (base.is_polynomial() && n.terms().size() == 1 && n.leading().coeff == 1 &&
      n.leading().mono.factors.size() == 1) {
    auto [id, k] = n.leading().mono.factors[0];
    Rational total = expo * k;
    const AtomData& d = atom_data(id);
    if (d.kind == AtomKind::Power) total *= d.expo;
    const Expr& inner = d.kind == AtomKind::Power ? *d.arg : atom_to_expr(id);
    if (is_integer(total)) return canonical_form(inner).pow(to_long(total));
    return RationalFn(Poly::atom(intern_power(inner, total)));
  }
  Expr bx = rational_fn_to_expr(base);
  return RationalFn(Poly::atom(intern_power(bx, expo)));
}

RationalFn fold(const Expr& x) {
  const ExprNode& n = x.node();
  switch (n.kind) {
    case ExprKind::Const:
      return RationalFn(Poly(n.cval));
    case ExprKind::Sym:
      return RationalFn(Poly::atom(n.sym));
    case ExprKind::Add: {
      RationalFn acc;
      for (const auto& k : n.kids) acc = acc + canonical_form(k);
      return acc;
    }
    case ExprKind::Mul: {
      RationalFn acc(Poly(Rational(1)));
      for (const auto& k : n.kids) acc = acc * canonical_form(k);
      return acc;
    }
    case ExprKind::Pow:
      return fold_pow(canonical_form(n.kids[0]), n.expo);
    case ExprKind::Sin:
      return fold_trig(true, canonical_form(n.kids[0]));
    case ExprKind::Cos:
      return fold_trig(false, canonical_form(n.kids[0]));
    case ExprKind::Func: {
      Expr arg = canonicalize(n.kids[0]);
      return RationalFn(Poly::atom(intern_func(n.fname, n.forder, arg)));
    }
  }
  throw SymbolicError("corrupt expression node");
}

Expr mark_canonical(Expr x, std::shared_ptr<const RationalFn> rf) {
  const ExprNode& n = x.node();
  n.canonical = true;
  std::call_once(n.canon_once, [&] { n.canon_cache = std::move(rf); });
  return x;
}

Expr term_to_expr(const Term& t) {
  std::vector<Expr> factors;
  if (t.coeff != 1 || t.mono.factors.empty()) factors.push_back(Expr::constant(t.coeff));
  for (const auto& [id, exp] : t.mono.factors) {
    Expr a = atom_to_expr(id);
    factors.push_back(exp == 1 ? a : a.pow(exp));
  }
  if (factors.size() == 1) return factors[0];
  auto n = make_node(ExprKind::Mul);
  n->kids = std::move(factors);
  return Expr(std::move(n));
}

Expr poly_to_expr(const Poly& p) {
  if (p.is_zero()) return Expr();
  std::vector<Expr> terms;
  terms.reserve(p.terms().size());
  for (const auto& t : p.terms()) terms.push_back(term_to_expr(t));
  if (terms.size() == 1) return terms[0];
  auto n = make_node(ExprKind::Add);
  n->kids = std::move(terms);
  return Expr(std::move(n));
}

Expr rational_fn_to_expr(const RationalFn& rf) {
  Expr num = poly_to_expr(rf.num());
  if (rf.is_polynomial()) return num;
  std::vector<Expr> dens;
  for (const auto& f : rf.den()) {
    Expr b = poly_to_expr(f.base);
    dens.push_back(f.exp == 1 ? b : b.pow(f.exp));
  }
  Expr den = dens[0];
  if (dens.size() > 1) {
    auto n = make_node(ExprKind::Mul);
    n->kids = std::move(dens);
    den = Expr(std::move(n));
  }
  auto n = make_node(ExprKind::Mul);
  n->kids = {num, den.pow(-1)};
  return Expr(std::move(n));
}

}  // namespace

const RationalFn& canonical_form(const Expr& x) {
  const ExprNode& n = x.node();
  std::call_once(n.canon_once, [&] { n.canon_cache = std::make_shared<RationalFn>(fold(x)); });
  return *n.canon_cache;
}

Expr canonicalize(const Expr& x) {
  if (x.node().canonical) return x;
  const RationalFn& rf = canonical_form(x);
  Expr out = rational_fn_to_expr(rf);
  return mark_canonical(std::move(out), x.node().canon_cache);
}

namespace {

// folds atom powers like (b^(1/2))^2 back into polynomials of b
RationalFn reduce_power_atoms(const Poly& p, bool& changed) {
  RationalFn acc;
  for (const auto& t : p.terms()) {
    RationalFn piece(Poly(t.coeff));
    Monomial rest;
    for (const auto& [id, exp] : t.mono.factors) {
      const AtomData& d = atom_data(id);
      Rational total = d.kind == AtomKind::Power ? d.expo * exp : Rational(1);
      if (d.kind == AtomKind::Power && boost::multiprecision::denominator(total) == 1) {
        piece = piece * canonical_form(*d.arg).pow(to_long(total));
        changed = true;
      } else {
        rest.factors.emplace_back(id, exp);
      }
    }
    if (!rest.factors.empty())
      piece = piece * RationalFn(Poly::from_terms({Term{Rational(1), rest}}));
    acc = acc + piece;
  }
  return acc;
}

}  // namespace

bool is_zero(const Expr& x) {
  const RationalFn& rf = canonical_form(x);
  if (rf.is_zero()) return true;
  Poly num = rf.num().trig_reduced();
  for (int pass = 0; pass < 4; ++pass) {
    if (num.is_zero()) return true;
    bool changed = false;
    RationalFn reduced = reduce_power_atoms(num, changed);
    if (!changed) break;
    num = reduced.num().trig_reduced();
  }
  return num.is_zero();
}

bool equal(const Expr& a, const Expr& b) { return is_zero(a - b); }

bool identical(const Expr& a, const Expr& b) {
  if (a.ptr() == b.ptr()) return true;
  const ExprNode& na = a.node();
  const ExprNode& nb = b.node();
  if (na.kind != nb.kind || na.cval != nb.cval || na.expo != nb.expo || na.sym != nb.sym ||
      na.fname != nb.fname || na.forder != nb.forder || na.kids.size() != nb.kids.size())
    return false;
  for (size_t i = 0; i < na.kids.size(); ++i) {
    if (!identical(na.kids[i], nb.kids[i])) return false;
  }
  return true;
}

int compare(const Expr& a, const Expr& b) {
  return RationalFn::compare(canonical_form(a), canonical_form(b));
}

// ---------------------------------------------------------------------------
// Differentiation (chain/product/quotient rules on the tree)
// ---------------------------------------------------------------------------

Expr differentiate(const Expr& x, const std::string& var) {
  const ExprNode& n = x.node();
  switch (n.kind) {
    case ExprKind::Const:
      return Expr();
    case ExprKind::Sym:
      return atom_data(n.sym).name == var ? Expr::integer(1) : Expr();
    case ExprKind::Add: {
      Expr acc;
      for (const auto& k : n.kids) acc = acc + differentiate(k, var);
      return acc;
    }
    case ExprKind::Mul: {
      Expr acc;
      for (size_t i = 0; i < n.kids.size(); ++i) {
        Expr piece = differentiate(n.kids[i], var);
        for (size_t j = 0; j < n.kids.size(); ++j) {
          if (j != i) piece = piece * n.kids[j];
        }
        acc = acc + piece;
      }
      return acc;
    }
    case ExprKind::Pow: {
      const Expr& base = n.kids[0];
      return Expr::constant(n.expo) * base.pow(n.expo - 1) * differentiate(base, var);
    }
    case ExprKind::Sin:
      return cos(n.kids[0]) * differentiate(n.kids[0], var);
    case ExprKind::Cos:
      return -(sin(n.kids[0]) * differentiate(n.kids[0], var));
    case ExprKind::Func:
      return Expr::func(n.fname, n.kids[0], n.forder + 1) * differentiate(n.kids[0], var);
  }
  throw SymbolicError("corrupt expression node");
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

namespace {

template <class T>
T rational_to(const Rational& q);

template <>
double rational_to<double>(const Rational& q) {
  return q.convert_to<double>();
}

template <>
Float50 rational_to<Float50>(const Rational& q) {
  return q.convert_to<Float50>();
}

template <class T>
T eval_node(const ExprNode& n, const BasicPoint<T>& p) {
  using std::cos;
  using std::pow;
  using std::sin;
  switch (n.kind) {
    case ExprKind::Const:
      return rational_to<T>(n.cval);
    case ExprKind::Sym: {
      const AtomData& d = atom_data(n.sym);
      if (const T* v = p.find(d.name)) return *v;
      throw UnboundSymbol("unbound symbol: " + d.name);
    }
    case ExprKind::Add: {
      T acc(0);
      for (const auto& k : n.kids) acc += eval_node(k.node(), p);
      return acc;
    }
    case ExprKind::Mul: {
      T acc(1);
      for (const auto& k : n.kids) acc *= eval_node(k.node(), p);
      return acc;
    }
    case ExprKind::Pow: {
      T b = eval_node(n.kids[0].node(), p);
      if (is_integer(n.expo)) {
        long e = boost::multiprecision::numerator(n.expo).convert_to<long>();
        if (e < 0 && b == T(0)) throw NumericSingularity("division by zero");
        return pow(b, static_cast<int>(e));
      }
      return pow(b, rational_to<T>(n.expo));
    }
    case ExprKind::Sin:
      return sin(eval_node(n.kids[0].node(), p));
    case ExprKind::Cos:
      return cos(eval_node(n.kids[0].node(), p));
    case ExprKind::Func: {
      std::string key = n.fname + std::string(static_cast<size_t>(n.forder), '\'');
      if (const T* v = p.find(key)) return *v;
      throw UnboundSymbol("unbound function value: " + key);
    }
  }
  throw SymbolicError("corrupt expression node");
}

template <class T>
bool finite(const T& v) {
  using std::isfinite;
  return isfinite(v);
}

template <>
bool finite<Float50>(const Float50& v) {
  return !isnan(v) && !isinf(v);  // ADL into boost::multiprecision
}

template <class T>
T eval_checked(const Expr& x, const BasicPoint<T>& p) {
  T v = eval_node(x.node(), p);
  if (!finite(v)) throw NumericSingularity("expression is singular at the given point");
  return v;
}

}  // namespace

double eval(const Expr& x, const Point& p) { return eval_checked(x, p); }
Float50 eval(const Expr& x, const PointExt& p) { return eval_checked(x, p); }

double to_double(const Rational& q) { return rational_to<double>(q); }
Float50 to_float50(const Rational& q) { return rational_to<Float50>(q); }

}  // namespace curvcheck
