#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "projmetric/numeric_function.hpp"

using namespace projmetric;
using namespace fixtures;

namespace {

Expr P(const Chart& ch, const char* s) { return parse_expression(s, ch); }

void expect_all_hold(const std::vector<IdentityResidual>& rs) {
  for (const auto& r : rs) EXPECT_TRUE(r.holds()) << r.name << " has " << r.nonzero << " nonzero components";
}

}  // namespace

TEST(Curvature, FlatConnection) {
  Chart ch = coords_chart(3);
  auto pkg = decompose(Connection::flat(ch), true);
  for (std::size_t k = 0; k < pkg.riemann.size(); ++k) EXPECT_TRUE(pkg.riemann.flat(k).is_zero());
  for (std::size_t k = 0; k < pkg.cotton.size(); ++k) EXPECT_TRUE(pkg.cotton.flat(k).is_zero());
  expect_all_hold(check_bianchi(pkg));
}

TEST(Curvature, Example1WeylAndSchouten) {
  Chart ch = xyz_chart({"a", "b", "c"});
  auto pkg = decompose(example1(ch), true);
  const auto& W = pkg.weyl;
  auto a1 = ch.f("a", 1), b1 = ch.f("b", 1), c1 = ch.f("c", 1);
  auto a = ch.f("a"), b = ch.f("b"), c = ch.f("c");
  Expr h(Rat(1, 2)), q(Rat(1, 4)), e(Rat(1, 8)), t(Rat(3, 8));
  // W^a_b = ½ W^a_bcd dx^c∧dx^d: the dx∧dy coefficient is W(a,b,0,1).
  EXPECT_EQ(W(0, 0, 0, 1), -h * c1);
  EXPECT_EQ(W(0, 0, 0, 2), -t * a1);
  EXPECT_EQ(W(0, 0, 1, 2), q * b1);
  EXPECT_EQ(W(0, 1, 0, 2), t * b1);
  EXPECT_EQ(W(0, 2, 0, 1), e * b1);
  EXPECT_EQ(W(1, 0, 1, 2), t * a1);
  EXPECT_EQ(W(1, 1, 0, 1), h * c1);
  EXPECT_EQ(W(1, 1, 0, 2), q * a1);
  EXPECT_EQ(W(1, 1, 1, 2), -t * b1);
  EXPECT_EQ(W(1, 2, 0, 1), -e * a1);
  EXPECT_EQ(W(2, 0, 0, 1), -a * c);
  EXPECT_EQ(W(2, 0, 1, 2), -h * c1);
  EXPECT_EQ(W(2, 1, 0, 1), b * c);
  EXPECT_EQ(W(2, 1, 0, 2), -h * c1);
  EXPECT_EQ(W(2, 2, 0, 2), e * a1);
  EXPECT_EQ(W(2, 2, 1, 2), e * b1);
  EXPECT_EQ(W(0, 1, 0, 1), Expr());

  const auto& Pt = pkg.schouten;
  EXPECT_EQ(Pt(0, 0), P(ch, "-(3/16)*a^2"));
  EXPECT_EQ(Pt(0, 1), Expr(Rat(1, 16)) * (Expr(8) * c1 + a * b));
  EXPECT_EQ(Pt(0, 2), -e * a1);
  EXPECT_EQ(Pt(1, 1), P(ch, "-(3/16)*b^2"));
  EXPECT_EQ(Pt(1, 2), -e * b1);
  EXPECT_EQ(Pt(2, 2), Expr());
  auto anti = antisymmetrize(Pt, ch, {0, 1});
  for (std::size_t k = 0; k < anti.size(); ++k) EXPECT_TRUE(anti.flat(k).is_zero());

  expect_all_hold(check_bianchi(pkg));
  expect_all_hold(check_decomposition(pkg));
}

TEST(Curvature, Example3Schouten) {
  Chart ch = xyz_chart({"a", "b", "c"});
  auto pkg = decompose(example3(ch), true);
  const auto& Pt = pkg.schouten;
  EXPECT_EQ(Pt(0, 0), P(ch, "-b*c"));
  EXPECT_EQ(Pt(0, 1), Expr(Rat(1, 2)) * ch.f("c", 1));
  EXPECT_EQ(Pt(1, 0), Expr(Rat(1, 2)) * ch.f("c", 1));
  EXPECT_EQ(Pt(1, 1), P(ch, "-a*c"));
  EXPECT_EQ(Pt(2, 2), P(ch, "-a*b"));
  EXPECT_EQ(pkg.weyl(0, 0, 0, 1), Expr(Rat(-1, 2)) * ch.f("c", 1));
  EXPECT_EQ(pkg.weyl(0, 2, 1, 2), -ch.f("a", 1));
  EXPECT_EQ(pkg.weyl(1, 2, 0, 2), -ch.f("b", 1));
  expect_all_hold(check_bianchi(pkg));
}

TEST(Curvature, DivergenceOfWeylOnExample1) {
  Chart ch = xyz_chart({"a", "b", "c"});
  auto pkg = decompose(example1(ch));
  auto DW = covariant_derivative(pkg.weyl, pkg.connection);
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = 0; b < 3; ++b)
      for (std::size_t c = 0; c < 3; ++c) {
        Expr v;
        for (std::size_t d = 0; d < 3; ++d) v += DW(d, a, b, c, d);
        EXPECT_EQ(v, pkg.cotton(b, c, a));
      }
}

TEST(Curvature, RicciIdentityOnVector) {
  // ∇_c∇_d V^a - ∇_d∇_c V^a = R^a_bcd V^b.
  std::mt19937 rng(7);
  Chart ch = coords_chart(3);
  Connection conn = random_connection(rng, ch, 1, 0.4);
  Tensor<Expr> V(3, "u");
  for (std::size_t a = 0; a < 3; ++a) V(a) = random_poly(rng, ch, 2);
  auto DDV = covariant_derivative(covariant_derivative(V, conn), conn);  // DDV(a,d,c) = ∇_c∇_d V^a
  auto R = curvature(conn);
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t c = 0; c < 3; ++c)
      for (std::size_t d = 0; d < 3; ++d) {
        Expr rhs;
        for (std::size_t b = 0; b < 3; ++b) rhs += R(a, b, c, d) * V(b);
        EXPECT_EQ(DDV(a, d, c) - DDV(a, c, d), rhs);
      }
}

TEST(Curvature, LeibnizAndContraction) {
  std::mt19937 rng(11);
  Chart ch = coords_chart(3);
  Connection conn = random_connection(rng, ch, 1, 0.4);
  Tensor<Expr> V(3, "u"), w(3, "d");
  for (std::size_t a = 0; a < 3; ++a) {
    V(a) = random_poly(rng, ch, 2);
    w(a) = random_poly(rng, ch, 1);
  }
  Tensor<Expr> s(3, "");
  for (std::size_t a = 0; a < 3; ++a) s() += V(a) * w(a);
  auto Ds = covariant_derivative(s, conn);
  auto DV = covariant_derivative(V, conn);
  auto Dw = covariant_derivative(w, conn);
  for (std::size_t c = 0; c < 3; ++c) {
    Expr rhs;
    for (std::size_t a = 0; a < 3; ++a) rhs += DV(a, c) * w(a) + V(a) * Dw(a, c);
    EXPECT_EQ(Ds(c), rhs);
  }
  Tensor<Expr> one(3, "", Expr(5));
  for (std::size_t c = 0; c < 3; ++c) EXPECT_TRUE(covariant_derivative(one, conn)(c).is_zero());
}

TEST(Curvature, SymmetrizeProjectors) {
  Chart ch = coords_chart(3);
  std::mt19937 rng(3);
  Tensor<Expr> A(3, "dd");
  for (std::size_t k = 0; k < A.size(); ++k) A.flat(k) = random_poly(rng, ch, 1);
  auto S = symmetrize(A, ch, {0, 1});
  auto As = antisymmetrize(S, ch, {0, 1});
  for (std::size_t k = 0; k < As.size(); ++k) EXPECT_TRUE(As.flat(k).is_zero());
  auto S2 = symmetrize(S, ch, {0, 1});
  for (std::size_t k = 0; k < S.size(); ++k) EXPECT_EQ(S.flat(k), S2.flat(k));
  auto Aa = antisymmetrize(A, ch, {0, 1});
  EXPECT_EQ(Aa(0, 1), Expr(Rat(1, 2)) * (A(0, 1) - A(1, 0)));
  Tensor<Expr> mixed(3, "ud");
  EXPECT_THROW(symmetrize(mixed, ch, {0, 1}), std::invalid_argument);
}

TEST(Curvature, JetFieldAgreesWithSymbolic) {
  Chart ch = xyz_chart({"a", "b", "c"});
  Connection conn = example1(ch);
  auto pkg = decompose(conn);
  NumericEnv env;
  env.functions = {compile_univariate("sin(t)", "t"), compile_univariate("exp(t/2)", "t"),
                   compile_univariate("1/(1+t*t)", "t")};
  std::vector<double> pt{0.3, -0.2, 0.7};
  PointEvaluator ev(ch, env, pt, 2);
  JetField jf(ev.layout(), 2);
  auto G = conn.gamma().map([&](const Expr& e) { return ev.jet(CompiledExpr(e, ch)); });
  auto js = curvature_set(jf, G);
  for (std::size_t k = 0; k < pkg.weyl.size(); ++k)
    EXPECT_NEAR(js.weyl.flat(k).value(), evaluate(pkg.weyl.flat(k), ch, pt, env), 1e-12);
  for (std::size_t k = 0; k < pkg.cotton.size(); ++k)
    EXPECT_NEAR(js.cotton.flat(k).value(), evaluate(pkg.cotton.flat(k), ch, pt, env), 1e-12);
}

TEST(Curvature, FiniteDifferenceOracle) {
  // Curvature from finite differences of Γ, step 1e-5.
  std::mt19937 rng(5);
  Chart ch = coords_chart(3);
  Connection conn = random_connection(rng, ch, 2, 0.3);
  auto R = curvature(conn);
  NumericEnv env;
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<double> x{u(rng), u(rng), u(rng)};
    auto G = [&](std::size_t a, std::size_t b, std::size_t c, const std::vector<double>& p) {
      return evaluate(conn(a, b, c), ch, p, env);
    };
    const double h = 1e-5;
    for (std::size_t a = 0; a < 3; ++a)
      for (std::size_t b = 0; b < 3; ++b)
        for (std::size_t c = 0; c < 3; ++c)
          for (std::size_t d = 0; d < 3; ++d) {
            auto dG = [&](std::size_t i, std::size_t j, std::size_t k, std::size_t dir) {
              auto p = x, m = x;
              p[dir] += h;
              m[dir] -= h;
              return (G(i, j, k, p) - G(i, j, k, m)) / (2 * h);
            };
            double v = dG(a, b, d, c) - dG(a, b, c, d);
            for (std::size_t e = 0; e < 3; ++e) v += G(a, e, c, x) * G(e, b, d, x) - G(a, e, d, x) * G(e, b, c, x);
            EXPECT_NEAR(evaluate(R(a, b, c, d), ch, x, env), v, 1e-6 * (1 + std::abs(v)));
          }
  }
}

TEST(Curvature, RandomConnectionIdentities) {
  std::mt19937 rng(2024);
  for (std::size_t n : {3u, 4u}) {
    Chart ch = coords_chart(n);
    for (int i = 0; i < 2; ++i) {
      auto pkg = decompose(random_connection(rng, ch, 2, 0.25), true);
      expect_all_hold(check_bianchi(pkg));
      expect_all_hold(check_decomposition(pkg));
    }
  }
}
