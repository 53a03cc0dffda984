// Copyright 2026 The curvcheck Authors
// SPDX-License-Identifier: Apache-2.0
//
// Symbolic scalar expressions over chart coordinates and named parameters.
// Expressions are immutable trees; canonicalization folds a tree into an
// expanded rational normal form (polynomial numerator over a factored
// denominator) with sin/cos kept as atomic factors.

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

namespace curvcheck {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;
using Float50 = boost::multiprecision::cpp_bin_float_50;

struct SymbolicError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ParseError : SymbolicError {
  using SymbolicError::SymbolicError;
};
struct UnboundSymbol : SymbolicError {
  using SymbolicError::SymbolicError;
};
struct NumericSingularity : SymbolicError {
  using SymbolicError::SymbolicError;
};
struct DivisionByZero : SymbolicError {
  using SymbolicError::SymbolicError;
};

class Expr;

// ---------------------------------------------------------------------------
// Atoms: the irreducible factors of the polynomial layer. A symbol, a sin/cos
// of a primitive angle, an applied function symbol m(t) with a derivative
// order, or a non-integer power of a base expression.
// ---------------------------------------------------------------------------

enum class AtomKind : std::uint8_t { Symbol, Sin, Cos, Func, Power };

using AtomId = std::uint32_t;

struct AtomData {
  AtomKind kind = AtomKind::Symbol;
  std::string name;            // Symbol and Func base name
  int order = 0;               // Func: number of primes
  std::shared_ptr<const Expr> arg;  // Sin/Cos/Func argument, Power base
  Rational expo = 0;           // Power exponent (non-integer)
  std::string key;             // stable interning/order key
};

const AtomData& atom_data(AtomId id);
AtomId intern_symbol(const std::string& name);
// total order on atoms, stable across runs
int atom_compare(AtomId a, AtomId b);

// ---------------------------------------------------------------------------
// Sparse multivariate polynomials over Q in the atoms.
// ---------------------------------------------------------------------------

struct Monomial {
  // sorted by atom_compare ascending, exponents > 0
  std::vector<std::pair<AtomId, int>> factors;
  bool operator==(const Monomial&) const = default;
};

int mono_compare(const Monomial& a, const Monomial& b);  // lex monomial order
Monomial mono_mul(const Monomial& a, const Monomial& b);
// nullopt when b does not divide a
std::optional<Monomial> mono_div(const Monomial& a, const Monomial& b);

struct Term {
  Rational coeff;
  Monomial mono;
};

class Poly {
 public:
  Poly() = default;
  explicit Poly(Rational c);
  static Poly atom(AtomId id, int exp = 1);

  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  const Rational& constant() const;  // requires is_constant()
  const std::vector<Term>& terms() const { return terms_; }
  const Term& leading() const { return terms_.front(); }

  friend Poly operator+(const Poly&, const Poly&);
  friend Poly operator-(const Poly&, const Poly&);
  friend Poly operator*(const Poly&, const Poly&);
  Poly operator-() const;
  Poly scaled(const Rational& c) const;
  Poly pow(unsigned k) const;

  static std::optional<Poly> divide_exact(const Poly& num, const Poly& den);
  static int compare(const Poly& a, const Poly& b);
  bool operator==(const Poly& o) const { return compare(*this, o) == 0; }

  // replaces sin(u)^2 with 1 - cos(u)^2 until all sin exponents are <= 1;
  // zero iff the polynomial vanishes modulo the Pythagorean identity
  Poly trig_reduced() const;

  // assembles terms (must be well formed: sorted descending, no zero coeffs)
  static Poly from_terms(std::vector<Term> terms);

 private:
  std::vector<Term> terms_;  // sorted by mono_compare descending
};

// ---------------------------------------------------------------------------
// Rational normal form: expanded numerator over a factored denominator.
// Denominator factors are monic, non-constant, sorted; uniqueness is up to
// the factor split, which is deterministic for a fixed construction path.
// ---------------------------------------------------------------------------

struct DenFactor {
  Poly base;  // monic, non-constant
  int exp = 1;
};

class RationalFn {
 public:
  RationalFn() = default;
  explicit RationalFn(Poly num) : num_(std::move(num)) {}
  RationalFn(Poly num, std::vector<DenFactor> den);

  const Poly& num() const { return num_; }
  const std::vector<DenFactor>& den() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }
  bool is_polynomial() const { return den_.empty(); }

  friend RationalFn operator+(const RationalFn&, const RationalFn&);
  friend RationalFn operator-(const RationalFn&, const RationalFn&);
  friend RationalFn operator*(const RationalFn&, const RationalFn&);
  friend RationalFn operator/(const RationalFn&, const RationalFn&);
  RationalFn operator-() const;
  RationalFn pow(long k) const;
  RationalFn inverse() const;

  static int compare(const RationalFn& a, const RationalFn& b);

 private:
  void cancel();
  Poly num_;
  std::vector<DenFactor> den_;
};

// ---------------------------------------------------------------------------
// Expression trees.
// ---------------------------------------------------------------------------

enum class ExprKind : std::uint8_t { Const, Sym, Add, Mul, Pow, Sin, Cos, Func };

struct ExprNode;

class Expr {
 public:
  Expr();  // zero
  static Expr constant(Rational c);
  static Expr integer(long long v);
  static Expr symbol(const std::string& name);
  // applied function symbol, e.g. func("m", symbol("t")); order = derivative order
  static Expr func(const std::string& name, const Expr& arg, int order = 0);

  ExprKind kind() const;
  const ExprNode& node() const { return *node_; }
  std::shared_ptr<const ExprNode> ptr() const { return node_; }

  Expr pow(const Rational& e) const;
  Expr pow(long e) const;

  friend Expr operator+(const Expr&, const Expr&);
  friend Expr operator-(const Expr&, const Expr&);
  friend Expr operator*(const Expr&, const Expr&);
  friend Expr operator/(const Expr&, const Expr&);
  Expr operator-() const;

  explicit Expr(std::shared_ptr<const ExprNode> n) : node_(std::move(n)) {}

 private:
  std::shared_ptr<const ExprNode> node_;
};

struct ExprNode {
  ExprKind kind = ExprKind::Const;
  Rational cval;            // Const
  Rational expo;            // Pow exponent
  AtomId sym = 0;           // Sym
  std::string fname;        // Func
  int forder = 0;           // Func
  std::vector<Expr> kids;   // Add/Mul children, Pow base, Sin/Cos/Func arg
  mutable bool canonical = false;

  mutable std::once_flag canon_once;
  mutable std::shared_ptr<const RationalFn> canon_cache;
};

Expr sin(const Expr& x);
Expr cos(const Expr& x);

// expanded rational normal form; idempotent (canonical inputs pass through)
Expr canonicalize(const Expr& x);
const RationalFn& canonical_form(const Expr& x);

Expr differentiate(const Expr& x, const std::string& var);

// symbolic zero test with the trig-aware rewrite
bool is_zero(const Expr& x);
// semantic equality, is_zero(a - b)
bool equal(const Expr& a, const Expr& b);
// structural identity of trees
bool identical(const Expr& a, const Expr& b);
// total order on canonical forms
int compare(const Expr& a, const Expr& b);

// deterministic canonical printing; parse(to_string(x)) is semantically x and
// to_string is a fixed point on its own output
std::string to_string(const Expr& x);
Expr parse_expr(std::string_view text);

// ---------------------------------------------------------------------------
// Numeric evaluation.
// ---------------------------------------------------------------------------

template <class T>
struct BasicPoint {
  std::map<std::string, T> coords;
  std::map<std::string, T> params;

  const T* find(const std::string& name) const {
    if (auto it = coords.find(name); it != coords.end()) return &it->second;
    if (auto it = params.find(name); it != params.end()) return &it->second;
    return nullptr;
  }
};

using Point = BasicPoint<double>;
using PointExt = BasicPoint<Float50>;

double eval(const Expr& x, const Point& p);
Float50 eval(const Expr& x, const PointExt& p);

double to_double(const Rational& q);
Float50 to_float50(const Rational& q);

}  // namespace curvcheck
