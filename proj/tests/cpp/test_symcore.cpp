// Copyright 2026 The curvcheck Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

#include "curvcheck/expr.hpp"

using namespace curvcheck;

namespace {

Expr S(const std::string& n) { return Expr::symbol(n); }
Expr I(long long v) { return Expr::integer(v); }

bool close(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

// random expression trees for the property suite
struct Gen {
  std::mt19937_64 rng;
  explicit Gen(uint64_t seed) : rng(seed) {}

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  }
  int pick(int n) { return static_cast<int>(rng() % static_cast<uint64_t>(n)); }

  Expr leaf() {
    switch (pick(5)) {
      case 0: return S("r");
      case 1: return S("M");
      case 2: return S("e");
      case 3: return S("w");
      default: return I(pick(7) - 3);
    }
  }

  Expr tree(int depth) {
    if (depth <= 0) return leaf();
    switch (pick(8)) {
      case 0: return tree(depth - 1) + tree(depth - 1);
      case 1: return tree(depth - 1) - tree(depth - 1);
      case 2: return tree(depth - 1) * tree(depth - 1);
      case 3: return tree(depth - 1) / tree(depth - 1);
      case 4: return tree(depth - 1).pow(pick(5) - 1);
      case 5: return sin(tree(depth - 2 > 0 ? depth - 2 : 0));
      case 6: return cos(tree(depth - 2 > 0 ? depth - 2 : 0));
      default: return leaf();
    }
  }

  Point point() {
    Point p;
    p.coords["r"] = uniform(0.3, 2.5);
    p.coords["w"] = uniform(0.3, 2.5);
    p.params["M"] = uniform(0.3, 2.5);
    p.params["e"] = uniform(0.3, 2.5);
    return p;
  }
};

}  // namespace

TEST_CASE("differentiate: power rule and f(r)") {
  Expr r = S("r");
  CHECK(equal(differentiate(r * r, "r"), I(2) * r));

  Expr M = S("M"), e = S("e"), L = S("Lambda");
  Expr f = I(1) - I(2) * M / r + e * e / (r * r) - L * r * r;
  Expr df = I(2) * M / (r * r) - I(2) * e * e / (r * r * r) - I(2) * L * r;
  CHECK(equal(differentiate(f, "r"), df));
}

TEST_CASE("differentiate: sin^2 theta and the product-form convention") {
  Expr th = S("theta");
  Expr d = differentiate(sin(th) * sin(th), "theta");
  CHECK(equal(d, I(2) * sin(th) * cos(th)));
  // sin(2*theta) canonicalizes to the same product form
  CHECK(equal(d, sin(I(2) * th)));
  CHECK(to_string(canonicalize(sin(I(2) * th))) == to_string(canonicalize(d)));

  // numeric cross-check against central differences at random angles
  Gen g(16);
  for (int i = 0; i < 16; ++i) {
    double x = g.uniform(0.2, 3.0);
    Point p;
    p.coords["theta"] = x;
    double got = eval(d, p);
    double h = 1e-6;
    Point pl = p, pr = p;
    pl.coords["theta"] = x - h;
    pr.coords["theta"] = x + h;
    Expr s2 = sin(th) * sin(th);
    double fd = (eval(s2, pr) - eval(s2, pl)) / (2 * h);
    CHECK(close(got, fd, 1e-6));
  }
}

TEST_CASE("differentiate: applied function symbols get fresh primes") {
  Expr t = S("t");
  Expr m = Expr::func("m", t);
  Expr d = differentiate(m, "t");
  CHECK(to_string(d) == "m'(t)");
  CHECK(to_string(differentiate(d, "t")) == "m''(t)");

  Point p;
  p.coords["t"] = 0.5;
  p.params["m'"] = 2.25;
  CHECK(eval(d, p) == doctest::Approx(2.25));
}

TEST_CASE("canonicalize: expansion and the shorthand identities") {
  Expr r = S("r");
  CHECK(to_string((r - I(1)) * (r + I(1))) == "r^2 - 1");

  Expr M = S("M"), e = S("e"), L = S("Lambda");
  Expr Y1 = I(2) * M * r - r * r + L * r.pow(4) - e * e;
  CHECK(is_zero(Y1 + r * r - I(2) * M * r - L * r.pow(4) + e * e));

  Expr Y2 = -(M * r) + L * r.pow(4) + e * e;
  CHECK(is_zero(Y2 + M * r - L * r.pow(4) - e * e));
}

TEST_CASE("canonicalize: idempotent and pointer-stable on canonical input") {
  Expr r = S("r"), M = S("M");
  Expr x = (r + M).pow(3) / (r - M);
  Expr c1 = canonicalize(x);
  Expr c2 = canonicalize(c1);
  CHECK(c1.ptr() == c2.ptr());
  CHECK(identical(c1, c2));
}

TEST_CASE("is_zero: trig-aware zero test") {
  Expr th = S("theta");
  CHECK(is_zero(Expr()));
  CHECK(is_zero(sin(th) * sin(th) + cos(th) * cos(th) - I(1)));
  CHECK(!is_zero(sin(th) * sin(th) + cos(th) * cos(th)));

  Expr r = S("r"), M = S("M"), e = S("e");
  Expr lhs = (I(2) * M * r - I(3) * e * e) / r.pow(4) - I(2) * M / r.pow(3) + I(3) * e * e / r.pow(4);
  CHECK(is_zero(lhs));
}

TEST_CASE("is_zero: never true on a provably nonzero form") {
  Expr r = S("r");
  CHECK(!is_zero(r - I(1)));
  CHECK(!is_zero(sin(S("theta"))));
}

TEST_CASE("eval: basic values and error paths") {
  Expr L = S("Lambda");
  Point p;
  p.params["Lambda"] = 0.01;
  CHECK(eval(I(-12) * L, p) == doctest::Approx(-0.12));

  Expr r = S("r");
  Point q;
  q.coords["r"] = 0.0;
  CHECK_THROWS_AS(eval(I(1) / r, q), NumericSingularity);
  CHECK_THROWS_AS(eval(S("nope"), q), UnboundSymbol);

  Expr M = S("M"), e = S("e");
  Expr Y4 = I(3) * M * r - I(4) * e * e;
  Point y;
  y.coords["r"] = 2.0;
  y.params["M"] = 1.0;
  y.params["e"] = 1.0;
  CHECK(eval(Y4, y) == doctest::Approx(2.0));
}

TEST_CASE("eval: extended precision") {
  Expr r = S("r");
  PointExt p;
  p.coords["r"] = Float50("0.1");
  Float50 v = eval(I(1) / (r * r * r), p);
  CHECK(abs(v - Float50(1000)) < Float50("1e-40"));
}

TEST_CASE("rational powers fold through integer exponents") {
  Expr r = S("r");
  Expr sq = r.pow(Rational(1) / 2);
  CHECK(equal(sq * sq, r));
  Point p;
  p.coords["r"] = 2.25;
  CHECK(eval(sq, p) == doctest::Approx(1.5));
  CHECK_THROWS_AS(eval((-r).pow(Rational(1) / 2), p), NumericSingularity);
}

TEST_CASE("parser: grammar round trips") {
  for (const char* text : {
           "r^2 - 1",
           "-Lambda - (2*M*r - 3*e^2)/(r^4)",
           "(2*M*r - r^2 + Lambda*r^4 - e^2)/(r^5)",
           "sin(theta)^2*cos(theta)",
           "m'(t)*q(t) + 1/2*r",
           "(r)^(1/2) + 3/4",
       }) {
    Expr e = parse_expr(text);
    std::string s1 = to_string(e);
    Expr e2 = parse_expr(s1);
    CHECK(to_string(e2) == s1);
    CHECK(equal(e, e2));
  }
  CHECK_THROWS_AS(parse_expr("r +"), ParseError);
  CHECK_THROWS_AS(parse_expr("(r"), ParseError);
  CHECK_THROWS_AS(parse_expr("r^theta"), ParseError);
  CHECK_THROWS_AS(parse_expr("sin'(t)"), ParseError);
}

TEST_CASE("property: canonicalization preserves evaluation (100 trees x 16 points)") {
  Gen g(42);
  int tested = 0;
  for (int i = 0; i < 100; ++i) {
    Expr x = g.tree(6);
    Expr c;
    try {
      c = canonicalize(x);
    } catch (const DivisionByZero&) {
      x = g.tree(3);  // tree divided by a symbolically zero subexpression
      c = canonicalize(x);
    }
    int pts = 0;
    for (int j = 0; j < 64 && pts < 16; ++j) {
      Point p = g.point();
      // compare in extended precision so the check measures the rewrite, not
      // double-precision cancellation in the unexpanded tree
      PointExt px;
      for (const auto& [k, v] : p.coords) px.coords[k] = v;
      for (const auto& [k, v] : p.params) px.params[k] = v;
      Float50 a, b;
      try {
        a = eval(x, px);
        b = eval(c, px);
      } catch (const NumericSingularity&) {
        continue;
      }
      ++pts;
      Float50 scale = abs(a) > 1 ? Float50(abs(a)) : Float50(1);
      CHECK(abs(a - b) <= Float50("1e-12") * scale);
    }
    if (pts > 0) ++tested;
  }
  CHECK(tested >= 90);
}

TEST_CASE("property: differentiate agrees with central differences") {
  Gen g(7);
  int tested = 0;
  for (int i = 0; i < 100; ++i) {
    Expr x = g.tree(4);
    Expr d = differentiate(x, "r");
    int pts = 0;
    for (int j = 0; j < 64 && pts < 8; ++j) {
      Point p = g.point();
      const double h = 1e-6;
      double v0, vl, vr, dv;
      try {
        v0 = eval(x, p);
        Point pl = p, pr = p;
        pl.coords["r"] -= h;
        pr.coords["r"] += h;
        vl = eval(x, pl);
        vr = eval(x, pr);
        dv = eval(d, p);
      } catch (const NumericSingularity&) {
        continue;
      }
      double fd = (vr - vl) / (2 * h);
      // skip ill-conditioned samples; the estimator itself loses digits there
      if (std::abs(v0) > 1e6 || std::abs(fd) > 1e6) continue;
      ++pts;
      CHECK(close(dv, fd, 1e-5));
    }
    if (pts > 0) ++tested;
  }
  CHECK(tested >= 60);
}

TEST_CASE("property: canonical order is total") {
  Gen g(11);
  std::vector<Expr> xs;
  while (xs.size() < 24) {
    try {
      xs.push_back(canonicalize(g.tree(3)));
    } catch (const DivisionByZero&) {
    }
  }
  for (const auto& a : xs) {
    for (const auto& b : xs) {
      int ab = compare(a, b);
      int ba = compare(b, a);
      CHECK(ab == -ba);
      if (ab == 0) CHECK(equal(a, b));
    }
  }
  // transitivity spot check on a sorted copy
  std::vector<Expr> sorted = xs;
  std::sort(sorted.begin(), sorted.end(),
            [](const Expr& a, const Expr& b) { return compare(a, b) < 0; });
  for (size_t i = 0; i + 1 < sorted.size(); ++i) {
    CHECK(compare(sorted[i], sorted[i + 1]) <= 0);
  }
}

TEST_CASE("expressions are shareable across threads") {
  Expr r = S("r"), M = S("M");
  Expr x = (r + M).pow(4) / (r - M) + sin(I(2) * r) * cos(r);
  std::vector<std::thread> ths;
  std::vector<std::string> out(4);
  for (int i = 0; i < 4; ++i) {
    ths.emplace_back([&, i] { out[static_cast<size_t>(i)] = to_string(x); });
  }
  for (auto& t : ths) t.join();
  for (int i = 1; i < 4; ++i) CHECK(out[0] == out[static_cast<size_t>(i)]);
}
