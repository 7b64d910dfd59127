#include <random>

#include <gtest/gtest.h>

#include "projmetric/poly.hpp"

using namespace projmetric;

namespace {

Var X() { return Var::make(VarKind::Coordinate, 0); }
Var Y() { return Var::make(VarKind::Coordinate, 1); }
Var Z() { return Var::make(VarKind::Coordinate, 2); }
Var F(unsigned k = 0) { return Var::make(VarKind::Function, 0, k); }

Poly random_poly(std::mt19937& rng, int terms, int maxdeg, const std::vector<Var>& vars) {
  std::uniform_int_distribution<int> coef(-9, 9), deg(0, maxdeg);
  std::uniform_int_distribution<std::size_t> pick(0, vars.size() - 1);
  std::vector<Term> t;
  for (int i = 0; i < terms; ++i) {
    Monomial m;
    int d = deg(rng);
    for (int k = 0; k < d; ++k) m = m * Monomial::of(vars[pick(rng)]);
    int c = coef(rng);
    if (c == 0) c = 1;
    t.push_back({m, Int(c)});
  }
  return Poly::from_terms(t);
}

}  // namespace

TEST(Poly, GradedLexOrder) {
  Monomial x = Monomial::of(X()), y = Monomial::of(Y());
  EXPECT_GT(compare(x, y), 0);
  EXPECT_GT(compare(y * y, x), 0);
  EXPECT_GT(compare(x * y, y * y), 0);
  EXPECT_EQ(compare(x * y, y * x), 0);
}

TEST(Poly, ArithmeticIdentities) {
  Poly x = Poly::var(X()), y = Poly::var(Y());
  Poly a = x * x - y * y;
  EXPECT_EQ(a, (x - y) * (x + y));
  EXPECT_TRUE((x * y - y * x).is_zero());
  EXPECT_EQ((x + 1L).pow(3), x * x * x + x * x * Poly(3L) + x * Poly(3L) + Poly(1L));
}

TEST(Poly, ExactDivision) {
  Poly x = Poly::var(X()), y = Poly::var(Y()), f = Poly::var(F());
  Poly p = (x * y + f) * (x - y * y + 3L);
  Poly q;
  ASSERT_TRUE(divides(x - y * y + 3L, p, &q));
  EXPECT_EQ(q, x * y + f);
  EXPECT_FALSE(divides(x + y, p));
}

TEST(Poly, GcdOfProducts) {
  std::mt19937 rng(7);
  std::vector<Var> vars{X(), Y(), Z(), F(), F(1)};
  for (int trial = 0; trial < 40; ++trial) {
    Poly g = random_poly(rng, 3, 3, vars);
    Poly a = random_poly(rng, 3, 3, vars);
    Poly b = random_poly(rng, 3, 3, vars);
    if (g.is_zero() || a.is_zero() || b.is_zero()) continue;
    Poly h = gcd(g * a, g * b);
    EXPECT_TRUE(divides(g.primitive_part(), h)) << "trial " << trial;
    EXPECT_TRUE(divides(h, g * a));
    EXPECT_TRUE(divides(h, g * b));
    Poly ca, cb;
    ASSERT_TRUE(divides(h, g * a, &ca));
    ASSERT_TRUE(divides(h, g * b, &cb));
    Poly rest = gcd(ca, cb);
    EXPECT_TRUE(rest.is_constant()) << "trial " << trial;
  }
}

TEST(Poly, GcdWithIntegerContent) {
  Poly x = Poly::var(X());
  Poly h = gcd((x + 1L).scaled(Int(6)), (x + 1L).scaled(Int(4)) * (x - 1L));
  EXPECT_EQ(h, (x + 1L).scaled(Int(2)));
}

TEST(Poly, PrsFallbackAgreesWithHeuristic) {
  Poly x = Poly::var(X()), y = Poly::var(Y());
  Poly f = (x * x + y) * (x - y + 2L);
  Poly g = (x * x + y) * (x + y * y);
  Poly r = pseudo_remainder(f, g, X());
  EXPECT_FALSE(r.is_zero());
  EXPECT_EQ(gcd(f, g), x * x + y);
}

TEST(Poly, DerivativeAndSubstitution) {
  Poly x = Poly::var(X()), y = Poly::var(Y());
  Poly p = x * x * y + x * 3L;
  EXPECT_EQ(p.derivative(X()), x * y * Poly(2L) + 3L);
  EXPECT_EQ(p.substitute(Y(), x + 1L), x * x * x + x * x + x * 3L);
}
