#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "projmetric/numeric_function.hpp"
#include "projmetric/projective.hpp"

using namespace projmetric;
using namespace fixtures;

namespace {

GaugeChange random_gauge(std::mt19937& rng, const Chart& ch, int degree, double density = 0.5) {
  std::vector<Expr> A(ch.dimension());
  for (auto& e : A) e = random_poly(rng, ch, degree, density);
  return {ScalarForm::one_form(A)};
}

void expect_same(const Tensor<Expr>& a, const Tensor<Expr>& b) {
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_EQ(a.flat(k), b.flat(k)) << "component " << k;
}

}  // namespace

TEST(Projective, ZeroGaugeIsIdentity) {
  std::mt19937 rng(1);
  Chart ch = coords_chart(3);
  auto c = random_connection(rng, ch, 2);
  expect_same(gauge_transform(c, GaugeChange::zero(3)).gamma(), c.gamma());
}

TEST(Projective, GaugeComposition) {
  std::mt19937 rng(2);
  Chart ch = coords_chart(3);
  auto c = random_connection(rng, ch, 2);
  auto A = random_gauge(rng, ch, 2), B = random_gauge(rng, ch, 1);
  expect_same(gauge_transform(gauge_transform(c, A), B).gamma(), gauge_transform(c, {A.A + B.A}).gamma());
}

TEST(Projective, GaugeLaws) {
  std::mt19937 rng(3);
  for (std::size_t n : {3u, 4u}) {
    Chart ch = coords_chart(n);
    auto c = random_connection(rng, ch, 1, 0.3);
    auto A = random_gauge(rng, ch, 1);
    auto p = decompose(c);
    auto q = decompose(gauge_transform(c, A));
    expect_same(q.weyl, p.weyl);
    // P̂_ab = P_ab - ∇_a A_b + A_a A_b, with ∇_a A_b = DA(b, a).
    Tensor<Expr> Ad(n, "d");
    for (std::size_t a = 0; a < n; ++a) Ad(a) = A.A(a);
    auto DA = covariant_derivative(Ad, c);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) EXPECT_EQ(q.schouten(a, b), p.schouten(a, b) - DA(b, a) + Ad(a) * Ad(b));
    // Ŷ_abc = Y_abc + A_d W^d_cab.
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b)
        for (std::size_t cc = 0; cc < n; ++cc) {
          Expr rhs = p.cotton(a, b, cc);
          for (std::size_t d = 0; d < n; ++d) rhs += Ad(d) * p.weyl(d, cc, a, b);
          EXPECT_EQ(q.cotton(a, b, cc), rhs);
        }
  }
}

TEST(Projective, Example2GaugeGivesLeviCivitaForms) {
  Chart ch = xyz_chart({"h"});
  Expr h = ch.f("h"), h1 = ch.f("h", 1);
  auto c = example2(ch);
  Expr A3 = -h1 / (Expr(2) * h);
  auto hat = gauge_transform(c, {ScalarForm::one_form({Expr(), Expr(), A3})});
  // Γ̂^a_b = Γ̂^a_bc dx^c.
  EXPECT_EQ(hat(0, 0, 2), A3);
  EXPECT_EQ(hat(1, 1, 2), A3);
  EXPECT_EQ(hat(0, 2, 0), A3);
  EXPECT_EQ(hat(1, 2, 1), A3);
  EXPECT_EQ(hat(2, 0, 1), h1);
  EXPECT_EQ(hat(2, 1, 0), h1);
  EXPECT_EQ(hat(2, 2, 2), Expr(2) * A3);
  EXPECT_EQ(hat(0, 0, 0), Expr());
  auto back = same_projective_class(c, hat);
  ASSERT_TRUE(back.has_value());
  EXPECT_EQ(back->A(2), A3);
  EXPECT_TRUE(back->A(0).is_zero());
}

TEST(Projective, SameClassRecognition) {
  std::mt19937 rng(4);
  Chart ch = coords_chart(3);
  auto c = random_connection(rng, ch, 2);
  auto self = same_projective_class(c, c);
  ASSERT_TRUE(self.has_value());
  EXPECT_TRUE(self->A.is_zero());
  auto A = random_gauge(rng, ch, 2);
  auto got = same_projective_class(c, gauge_transform(c, A));
  ASSERT_TRUE(got.has_value());
  EXPECT_EQ(got->A, A.A);

  Chart xyz = xyz_chart({"a", "b", "c"});
  EXPECT_FALSE(same_projective_class(Connection::flat(xyz), example1(xyz)).has_value());
}

TEST(Projective, MakeSpecial) {
  Chart xyz = xyz_chart({"a", "b", "c"});
  auto r1 = make_special(example1(xyz));
  EXPECT_EQ(r1.route, SpecialResult::Route::AlreadySpecial);
  EXPECT_TRUE(r1.gauge.A.is_zero());

  Chart ch = coords_chart(3);
  std::mt19937 rng(5);
  for (int trial = 0; trial < 4; ++trial) {
    GaugeChange A = random_gauge(rng, ch, 2);
    auto c = trial % 2 ? gauge_transform(Connection::flat(ch), A) : gauge_transform(random_connection(rng, ch, 1), A);
    auto r = make_special(c);
    auto pkg = decompose(r.connection);
    auto anti = antisymmetrize(pkg.schouten, ch, {0, 1});
    for (std::size_t k = 0; k < anti.size(); ++k) EXPECT_TRUE(anti.flat(k).is_zero());
    // Traceless curvature Ω^a_a.
    for (std::size_t cc = 0; cc < 3; ++cc)
      for (std::size_t d = 0; d < 3; ++d) {
        Expr t;
        for (std::size_t a = 0; a < 3; ++a) t += pkg.riemann(a, a, cc, d);
        EXPECT_TRUE(t.is_zero());
      }
    EXPECT_TRUE(same_projective_class(c, r.connection).has_value());
  }
}

TEST(Projective, MakeSpecialPrimitiveRoute) {
  Chart ch = coords_chart(3);
  // A = x2 dx1 is not closed; the trace 4 x2 dx1 has a rational potential.
  auto c = gauge_transform(Connection::flat(ch), {ScalarForm::one_form({ch.x(1), Expr(), Expr()})});
  auto r = make_special(c);
  EXPECT_EQ(r.route, SpecialResult::Route::Primitive);
  EXPECT_TRUE(is_special(r.connection));
}

TEST(Projective, Flatness) {
  Chart ch = coords_chart(3);
  EXPECT_TRUE(is_projectively_flat(Connection::flat(ch)));
  std::mt19937 rng(6);
  EXPECT_TRUE(is_projectively_flat(gauge_transform(Connection::flat(ch), random_gauge(rng, ch, 2))));

  Chart xyz = xyz_chart({"a", "b", "c"});
  EXPECT_FALSE(is_projectively_flat(example1(xyz)));

  // c = z, b = s1 z^(-3/2), a = s2 z^(-3/2).
  Chart p = xyz_chart({"a", "b"});
  Expr rate = Expr(Rat(-3, 2)) / p.x(2);
  p.set_exp_rate(0, rate);
  p.set_exp_rate(1, rate);
  // The Cotton tensor vanishes there, the Weyl tensor does not (W^1_112 = -c'/2).
  auto pk = decompose(conn_from(p, {{1, 2, 3, "a"}, {2, 1, 3, "b"}, {3, 1, 2, "z"}}));
  for (std::size_t k = 0; k < pk.cotton.size(); ++k) EXPECT_TRUE(pk.cotton.flat(k).is_zero());
  EXPECT_EQ(pk.weyl(0, 0, 0, 1), Expr(Rat(-1, 2)));
  EXPECT_FALSE(is_projectively_flat(pk));
  // Constant coefficients: W = 0.
  Chart k = xyz_chart({}, {"s1", "s2", "s3"});
  EXPECT_TRUE(is_projectively_flat(conn_from(k, {{1, 2, 3, "s1"}, {2, 1, 3, "s2"}, {3, 1, 2, "s3"}})));
  EXPECT_FALSE(is_projectively_flat(conn_from(p, {{1, 2, 3, "a"}, {2, 1, 3, "b"}, {3, 1, 2, "z^2"}})));

  // n = 2 uses the Cotton tensor.
  Chart c2 = coords_chart(2);
  EXPECT_TRUE(is_projectively_flat(gauge_transform(Connection::flat(c2), random_gauge(rng, c2, 2))));
  EXPECT_FALSE(is_projectively_flat(conn_from(c2, {{1, 2, 2, "x1^2"}})));
}

TEST(Projective, FlatGeodesicIsStraight) {
  Chart ch = coords_chart(3);
  NumericEnv env;
  std::vector<double> x0{0.1, 0.2, -0.3}, v0{1, 2, 2};
  auto tr = integrate_geodesic(Connection::flat(ch), env, x0, v0, 1.5);
  for (const auto& s : tr)
    for (std::size_t a = 0; a < 3; ++a) EXPECT_NEAR(s.x[a], x0[a] + s.s * v0[a] / 3.0, 1e-12);
}

TEST(Projective, GeodesicTracesAgreeUnderGauge) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  Chart ch = coords_chart(3);
  NumericEnv env;
  for (int trial = 0; trial < 6; ++trial) {
    auto c = random_connection(rng, ch, 1, 0.3);
    auto cg = gauge_transform(c, random_gauge(rng, ch, 1));
    std::vector<double> x0{u(rng), u(rng), u(rng)}, v0{u(rng), u(rng), u(rng)};
    auto a = integrate_geodesic(c, env, x0, v0, 0.4);
    auto b = integrate_geodesic(cg, env, x0, v0, 0.4);
    EXPECT_LT(trace_deviation(a, b), 1e-6);
  }
}
