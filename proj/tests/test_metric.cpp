#include <gtest/gtest.h>

#include "metric_fixtures.hpp"
#include "projmetric/linalg.hpp"
#include "projmetric/metric.hpp"
#include "projmetric/numeric_function.hpp"
#include "projmetric/projective.hpp"

using namespace projmetric;
using namespace fixtures;

namespace {

bool all_zero(const Tensor<Expr>& t) {
  for (std::size_t k = 0; k < t.size(); ++k)
    if (!t.flat(k).is_zero()) return false;
  return true;
}

}  // namespace

TEST(Linalg, DeterminantAndInverse) {
  Chart ch = coords_chart(3);
  std::mt19937 rng(9);
  ExprMatrix m(3, std::vector<Expr>(3));
  for (auto& r : m)
    for (auto& e : r) e = random_poly(rng, ch, 1, 0.6);
  // Cofactor expansion oracle.
  Expr cof = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
             m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  EXPECT_EQ(determinant(m), cof);
  if (!cof.is_zero()) {
    auto inv = inverse(m);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) {
        Expr s;
        for (std::size_t k = 0; k < 3; ++k) s += m[i][k] * inv[k][j];
        EXPECT_EQ(s, Expr(i == j ? 1 : 0));
      }
  }
  ExprMatrix zero_pivot{{Expr(), Expr(1)}, {Expr(1), Expr()}};
  EXPECT_EQ(determinant(zero_pivot), Expr(-1));
  ExprMatrix sing{{ch.x(0), ch.x(1)}, {ch.x(0) * ch.x(2), ch.x(1) * ch.x(2)}};
  EXPECT_TRUE(determinant(sing).is_zero());
  EXPECT_THROW(inverse(sing), std::domain_error);
}

TEST(Metric, RejectsBadInput) {
  Chart ch = coords_chart(2);
  Tensor<Expr> g(2, "dd");
  g(0, 1) = ch.x(0);
  EXPECT_THROW(Metric(ch, g), std::invalid_argument);
  g(1, 0) = ch.x(0);
  EXPECT_NO_THROW(Metric(ch, g));
  Tensor<Expr> s(2, "dd");
  s(0, 0) = Expr(1);
  EXPECT_THROW(Metric(ch, s), SingularMetric);
}

TEST(Metric, FlatEta) {
  Chart ch = coords_chart(4);
  Tensor<Expr> g(4, "dd");
  for (std::size_t a = 0; a < 4; ++a) g(a, a) = Expr(a < 3 ? 1 : -1);
  Metric m(ch, g);
  auto lc = levi_civita(m);
  EXPECT_TRUE(all_zero(lc.gamma()));
  auto md = metric_decomposition(m);
  EXPECT_TRUE(all_zero(md.weyl));
  EXPECT_TRUE(md.scalar.is_zero());
  EXPECT_TRUE(all_zero(weyl_equality_residual(m)));
  auto pkg = decompose(lc);
  EXPECT_TRUE(all_zero(pkg.schouten));
}

TEST(Metric, Example2LeviCivitaForms) {
  Chart ch = xyz_chart({"h"});
  Expr h = ch.f("h"), h1 = ch.f("h", 1);
  Metric m = example2_metric(ch);
  auto lc = levi_civita(m);
  EXPECT_TRUE(metric_compatibility(m, lc).holds());
  Expr q = -h1 / (Expr(2) * h);
  EXPECT_EQ(lc(0, 0, 2), q);
  EXPECT_EQ(lc(0, 2, 0), q);
  EXPECT_EQ(lc(1, 1, 2), q);
  EXPECT_EQ(lc(1, 2, 1), q);
  EXPECT_EQ(lc(2, 0, 1), h1);
  EXPECT_EQ(lc(2, 1, 0), h1);
  EXPECT_EQ(lc(2, 2, 2), -h1 / h);
  auto A = same_projective_class(example2(ch), lc);
  ASSERT_TRUE(A.has_value());
  EXPECT_EQ(A->A(2), q);
}

TEST(Metric, Example2GeodesicsMatchConnection) {
  Chart ch = xyz_chart({"h"});
  NumericEnv env;
  env.functions = {compile_univariate("2+sin(t)", "t")};
  auto lc = levi_civita(example2_metric(ch));
  auto c = example2(ch);
  std::mt19937 rng(12);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (int i = 0; i < 5; ++i) {
    std::vector<double> x0{u(rng), u(rng), u(rng)}, v0{u(rng), u(rng), u(rng)};
    EXPECT_LT(trace_deviation(integrate_geodesic(lc, env, x0, v0, 0.8), integrate_geodesic(c, env, x0, v0, 0.8)), 1e-6);
  }
}

TEST(Metric, RandomMetricIdentities) {
  std::mt19937 rng(13);
  Chart ch = coords_chart(3);
  for (int i = 0; i < 3; ++i) {
    Metric m = random_metric(rng, ch, i % 2 ? 3 : 2);
    auto lc = levi_civita(m);
    EXPECT_TRUE(metric_compatibility(m, lc).holds());
    auto md = metric_decomposition(m);
    // Recombination with the metric Schouten tensor.
    Tensor<Expr> Pu(3, "ud");
    for (std::size_t a = 0; a < 3; ++a)
      for (std::size_t c = 0; c < 3; ++c)
        for (std::size_t e = 0; e < 3; ++e) Pu(a, c) += m.upper()(a, e) * md.schouten(e, c);
    for (std::size_t a = 0; a < 3; ++a)
      for (std::size_t b = 0; b < 3; ++b)
        for (std::size_t c = 0; c < 3; ++c)
          for (std::size_t d = 0; d < 3; ++d) {
            Expr r = md.weyl(a, b, c, d) + m.lower()(b, d) * Pu(a, c) - m.lower()(b, c) * Pu(a, d);
            if (a == c) r += md.schouten(d, b);
            if (a == d) r -= md.schouten(c, b);
            EXPECT_EQ(r, md.riemann(a, b, c, d));
          }
    for (const auto& r : projective_vs_metric_report(m)) EXPECT_TRUE(r.holds()) << r.name;
  }
}

TEST(Metric, WeylEqualityResidual) {
  Chart ch = coords_chart(3);
  Tensor<Expr> g(3, "dd");
  g(0, 0) = Expr(1);
  g(1, 1) = Expr(1);
  g(2, 2) = Expr(1) + ch.x(0) * ch.x(0);
  Metric m(ch, g);
  EXPECT_FALSE(all_zero(weyl_equality_residual(m)));
  // Projective and metric Weyl differ there.
  auto md = metric_decomposition(m);
  auto pkg = decompose(levi_civita(m));
  bool differ = false;
  for (std::size_t k = 0; k < md.weyl.size(); ++k) differ |= md.weyl.flat(k) != pkg.weyl.flat(k);
  EXPECT_TRUE(differ);
  // Einstein: constant curvature.
  EXPECT_TRUE(all_zero(weyl_equality_residual(desitter_metric(3, 0, {Rat(1), Rat(0), Rat(2)}))));
}

TEST(Metric, DeSitterFamily) {
  struct Case {
    std::size_t p, q;
    std::vector<Rat> X;
  };
  std::vector<Case> cases = {{3, 0, {1, 2, 0}},  {2, 1, {1, 0, 1}},     {2, 1, {1, 0, 0}},
                             {2, 1, {0, 0, 1}},  {3, 1, {0, 1, 0, 1}},  {3, 1, {1, 0, 0, 0}},
                             {3, 1, {0, 0, 0, 2}}};
  for (const auto& cs : cases) {
    const std::size_t n = cs.p + cs.q;
    Rat eXX(0);
    for (std::size_t a = 0; a < n; ++a) eXX += (a < cs.p ? 1 : -1) * cs.X[a] * cs.X[a];
    Metric m = desitter_metric(cs.p, cs.q, cs.X);
    auto md = metric_decomposition(m);
    EXPECT_EQ(md.scalar, Expr(Rat(static_cast<long>(n * (1 - static_cast<long>(n)))) * eXX));
    EXPECT_TRUE(all_zero(md.weyl));
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b)
        EXPECT_EQ(md.ricci(a, b), Expr(Rat(1 - static_cast<long>(n)) * eXX) * m.lower()(a, b));
    auto lc = levi_civita(m);
    EXPECT_TRUE(is_projectively_flat(lc));
    for (const auto& r : projective_vs_metric_report(m)) EXPECT_TRUE(r.holds()) << r.name;
  }
  EXPECT_THROW(desitter_metric(2, 1, {0, 0, 0}), std::invalid_argument);
}
