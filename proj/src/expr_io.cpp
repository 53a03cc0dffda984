// Copyright 2026 The curvcheck Authors
// SPDX-License-Identifier: Apache-2.0
//
// Canonical printing and the small expression grammar:
//   expr   := term (('+'|'-') term)*
//   term   := unary (('*'|'/') unary)*
//   unary  := ('-'|'+') unary | power
//   power  := primary ('^' exponent)?
//   primary:= integer | ident primes? ('(' expr ')')? | '(' expr ')'
// sin/cos are reserved function names; any other ident with arguments is an
// opaque applied-function symbol (primes select the derivative order).

#include "curvcheck/expr.hpp"

#include <cctype>
#include <sstream>

namespace curvcheck {

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

namespace {

std::string rational_str(const Rational& q) { return q.str(); }

std::string atom_str(AtomId id) {
  const AtomData& d = atom_data(id);
  switch (d.kind) {
    case AtomKind::Symbol:
      return d.name;
    case AtomKind::Sin:
      return "sin(" + to_string(*d.arg) + ")";
    case AtomKind::Cos:
      return "cos(" + to_string(*d.arg) + ")";
    case AtomKind::Func:
      return d.name + std::string(static_cast<size_t>(d.order), '\'') + "(" + to_string(*d.arg) + ")";
    case AtomKind::Power: {
      const auto num = boost::multiprecision::numerator(d.expo);
      const auto den = boost::multiprecision::denominator(d.expo);
      return "(" + to_string(*d.arg) + ")^(" + num.str() + "/" + den.str() + ")";
    }
  }
  return "?";
}

std::string mono_str(const Monomial& m) {
  std::string out;
  for (size_t i = 0; i < m.factors.size(); ++i) {
    if (i) out += "*";
    out += atom_str(m.factors[i].first);
    if (m.factors[i].second != 1) out += "^" + std::to_string(m.factors[i].second);
  }
  return out;
}

std::string term_str(const Rational& coeff, const Monomial& m) {
  if (m.factors.empty()) return rational_str(coeff);
  if (coeff == 1) return mono_str(m);
  if (coeff == -1) return "-" + mono_str(m);
  return rational_str(coeff) + "*" + mono_str(m);
}

std::string poly_str(const Poly& p) {
  if (p.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (const auto& t : p.terms()) {
    if (first) {
      out += term_str(t.coeff, t.mono);
      first = false;
    } else if (t.coeff < 0) {
      out += " - " + term_str(-t.coeff, t.mono);
    } else {
      out += " + " + term_str(t.coeff, t.mono);
    }
  }
  return out;
}

}  // namespace

std::string to_string(const Expr& x) {
  const RationalFn& rf = canonical_form(x);
  if (rf.is_zero()) return "0";
  std::string num = poly_str(rf.num());
  if (rf.is_polynomial()) return num;
  if (rf.num().terms().size() > 1) num = "(" + num + ")";
  std::string den;
  for (size_t i = 0; i < rf.den().size(); ++i) {
    if (i) den += "*";
    den += "(" + poly_str(rf.den()[i].base) + ")";
    if (rf.den()[i].exp != 1) den += "^" + std::to_string(rf.den()[i].exp);
  }
  if (rf.den().size() > 1) den = "(" + den + ")";
  return num + "/" + den;
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

namespace {

struct Parser {
  std::string_view s;
  size_t pos = 0;

  void skip() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }
  bool eat(char c) {
    skip();
    if (pos < s.size() && s[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }
  char peek() {
    skip();
    return pos < s.size() ? s[pos] : '\0';
  }
  [[noreturn]] void fail(const std::string& why) {
    throw ParseError(why + " at offset " + std::to_string(pos) + " in '" + std::string(s) + "'");
  }

  Expr parse() {
    Expr e = expr();
    skip();
    if (pos != s.size()) fail("trailing input");
    return e;
  }

  Expr expr() {
    Expr acc = term();
    while (true) {
      if (eat('+')) {
        acc = acc + term();
      } else if (eat('-')) {
        acc = acc - term();
      } else {
        return acc;
      }
    }
  }

  Expr term() {
    Expr acc = unary();
    while (true) {
      if (eat('*')) {
        acc = acc * unary();
      } else if (eat('/')) {
        acc = acc / unary();
      } else {
        return acc;
      }
    }
  }

  Expr unary() {
    if (eat('-')) return -unary();
    if (eat('+')) return unary();
    return power();
  }

  Expr power() {
    Expr base = primary();
    if (!eat('^')) return base;
    Expr e = unary();  // exponents are themselves tiny expressions
    const RationalFn& rf = canonical_form(e);
    if (!rf.is_polynomial() || !rf.num().is_constant()) {
      // allow the (p/q) written form, which folds to a constant; anything
      // else is not a rational exponent
      fail("exponent must be a rational constant");
    }
    return base.pow(rf.num().constant());
  }

  Expr primary() {
    skip();
    if (pos >= s.size()) fail("unexpected end of input");
    char c = s[pos];
    if (std::isdigit(static_cast<unsigned char>(c))) return number();
    if (c == '(') {
      ++pos;
      Expr e = expr();
      if (!eat(')')) fail("expected ')'");
      return e;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    fail("unexpected character");
  }

  Expr number() {
    size_t start = pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
    return Expr::constant(Rational(BigInt(std::string(s.substr(start, pos - start)))));
  }

  Expr identifier() {
    size_t start = pos;
    while (pos < s.size() &&
           (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
      ++pos;
    std::string name(s.substr(start, pos - start));
    int primes = 0;
    while (pos < s.size() && s[pos] == '\'') {
      ++primes;
      ++pos;
    }
    if (peek() == '(') {
      eat('(');
      Expr arg = expr();
      if (!eat(')')) fail("expected ')' after function argument");
      if (name == "sin") {
        if (primes) fail("sin takes no primes");
        return sin(arg);
      }
      if (name == "cos") {
        if (primes) fail("cos takes no primes");
        return cos(arg);
      }
      return Expr::func(name, arg, primes);
    }
    if (primes) fail("primes require an applied function, e.g. m'(t)");
    return Expr::symbol(name);
  }
};

}  // namespace

Expr parse_expr(std::string_view text) {
  Parser p{text};
  return p.parse();
}

}  // namespace curvcheck
