#include <gtest/gtest.h>

#include "metric_fixtures.hpp"
#include "projmetric/linalg.hpp"
#include "projmetric/obstructions.hpp"
#include "projmetric/projective.hpp"
#include "projmetric/prolongation.hpp"

using namespace projmetric;
using namespace fixtures;

namespace {

struct Obstructions {
  Tensor<Expr> T, S, U;
};

Obstructions obstructions(const CurvaturePackage& pkg) {
  ExprField f(pkg.connection.chart());
  auto DW = covariant_derivative(pkg.weyl, pkg.connection);
  auto DY = covariant_derivative(pkg.cotton, pkg.connection);
  return {obstruction_T(f, pkg.weyl), obstruction_S(f, pkg.cotton, DW), obstruction_U(f, pkg.schouten, pkg.weyl, DY)};
}

Expr dot(const std::vector<Expr>& row, const std::vector<Expr>& v) {
  Expr s;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!row[i].is_zero() && !v[i].is_zero()) s += row[i] * v[i];
  return s;
}

// Checks every algebraic row and the prolongation equations on the state
// (g^ab, μ^a), with ρ solved from the μ^1 row in direction 1.
void expect_state_solves(const CurvaturePackage& pkg, const Tensor<Expr>& g_upper, const std::vector<Expr>& mu) {
  const Chart& ch = pkg.connection.chart();
  const std::size_t n = ch.dimension(), m = sym_count(n);
  ExprField f(ch);
  auto ob = obstructions(pkg);
  std::vector<Expr> s(m + n + 1);
  for (std::size_t k = 0; k < m; ++k) {
    auto [a, b] = sym_pair(n, k);
    s[k] = g_upper(a, b);
  }
  for (std::size_t a = 0; a < n; ++a) s[m + a] = mu[a];

  std::vector<Expr> x(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(m + n));
  const std::pair<AlgebraicStage, const Tensor<Expr>*> stages[] = {
      {AlgebraicStage::T, &ob.T}, {AlgebraicStage::IC1, &ob.S}, {AlgebraicStage::I2, &ob.U}};
  for (auto [stage, t] : stages)
    for (const auto& row : algebraic_rows(f, stage, *t, pkg.weyl, pkg.cotton))
      EXPECT_TRUE(dot(row, x).is_zero()) << stage_name(stage);

  auto pc = prolongation_connection(pkg);
  const auto& B0 = pc.B[0];
  Expr rest;
  for (std::size_t j = 0; j + 1 < s.size(); ++j)
    if (!B0[m][j].is_zero()) rest += B0[m][j] * s[j];
  s[m + n] = ch.differentiate(s[m], 0) - rest;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t i = 0; i < s.size(); ++i) EXPECT_EQ(dot(pc.B[a][i], s), ch.differentiate(s[i], a)) << a << " " << i;
}

}  // namespace

TEST(Obstructions, SymmetryIndexing) {
  for (std::size_t n : {2u, 3u, 4u}) {
    for (std::size_t k = 0; k < sym_count(n); ++k) {
      auto [a, b] = sym_pair(n, k);
      EXPECT_LE(a, b);
      EXPECT_EQ(sym_index(n, a, b), k);
      EXPECT_EQ(sym_index(n, b, a), k);
    }
  }
}

TEST(Obstructions, FlatVanish) {
  Chart ch = coords_chart(3);
  auto pkg = decompose(Connection::flat(ch));
  auto ob = obstructions(pkg);
  for (const auto* t : {&ob.T, &ob.S, &ob.U})
    for (std::size_t k = 0; k < t->size(); ++k) EXPECT_TRUE(t->flat(k).is_zero());
}

TEST(Obstructions, LeviCivitaStatesSolveEverything) {
  Chart ch({"x", "y", "z"}, {{"h", 2, {}}});
  for (const Metric& g : {example2_metric(ch), unimodular_metric(ch)}) {
    auto pkg = decompose(levi_civita(g));
    expect_state_solves(pkg, g.upper(), std::vector<Expr>(3));
  }
}

TEST(Obstructions, GaugedLeviCivitaState) {
  // A = ½ d log u with u = 1 + x²: ĝ^ab = g^ab/u, μ̂^c = g^cd A_d / u.
  Chart ch = xyz_chart({});
  Metric g = unimodular_metric(ch);
  Expr u = Expr(1) + ch.x(0) * ch.x(0);
  std::vector<Expr> A{ch.x(0) / u, Expr(), Expr()};
  auto conn = gauge_transform(levi_civita(g), GaugeChange{ScalarForm::one_form(A)});
  auto pkg = decompose(conn);
  Tensor<Expr> gh = g.upper().map([&](const Expr& e) { return e / u; });
  std::vector<Expr> mu(3);
  for (std::size_t c = 0; c < 3; ++c)
    for (std::size_t d = 0; d < 3; ++d) mu[c] += g.upper()(c, d) * A[d] / u;
  expect_state_solves(pkg, gh, mu);
}

TEST(Obstructions, Example1TauDeterminants) {
  Chart ch = xyz_chart({"a", "b", "c"});
  auto pkg = decompose(example1(ch));
  ExprField f(ch);
  auto T = obstruction_T(f, pkg.weyl);
  Expr t13 = determinant(tau_matrix(f, T, 0, 2));
  Expr t23 = determinant(tau_matrix(f, T, 1, 2));
  Expr t12 = determinant(tau_matrix(f, T, 0, 1));
  auto a = ch.f("a"), b = ch.f("b"), c = ch.f("c");
  auto a1 = ch.f("a", 1), b1 = ch.f("b", 1), c1 = ch.f("c", 1);
  Expr printed13 = Expr(Rat(-9, 8192)) * a1.pow(6);
  Expr k = t13 / printed13;
  ASSERT_TRUE(k.is_constant());
  EXPECT_EQ(k, Expr(Rat(8, 729)));
  EXPECT_EQ(t23 / k, Expr(Rat(-9, 8192)) * b1.pow(6));
  Expr w = b * a1 - a * b1;
  // Printed with the opposite sign.
  EXPECT_EQ(t12 / k, Expr(Rat(3, 128)) * c * c * c1 * c1 * w * w);

  // Constant a, b: all vanish.
  Chart cc = xyz_chart({"c"}, {"a", "b"});
  auto pk = decompose(conn_from(cc, {{1, 1, 1, "(1/2)*a"}, {1, 1, 2, "-(1/4)*b"}, {2, 2, 1, "-(1/4)*a"},
                                     {2, 2, 2, "(1/2)*b"}, {3, 1, 2, "c"}, {3, 1, 3, "-(1/4)*a"},
                                     {3, 2, 3, "-(1/4)*b"}, {3, 3, 1, "-(1/4)*a"}, {3, 3, 2, "-(1/4)*b"}}));
  ExprField fc(cc);
  auto Tc = obstruction_T(fc, pk.weyl);
  for (auto [e, d] : {std::pair<std::size_t, std::size_t>{0, 1}, {0, 2}, {1, 2}})
    EXPECT_TRUE(determinant(tau_matrix(fc, Tc, e, d)).is_zero());
}

TEST(Obstructions, TauVanishingLocusIsGaugeInvariant) {
  Chart ch = xyz_chart({"a", "b", "c"});
  auto conn = example1(ch);
  std::vector<Expr> A{ch.x(1), ch.x(0) * ch.x(2), Expr(1)};
  auto conn2 = gauge_transform(conn, GaugeChange{ScalarForm::one_form(A)});
  ExprField f(ch);
  auto T1 = obstruction_T(f, decompose(conn).weyl);
  auto T2 = obstruction_T(f, decompose(conn2).weyl);
  for (auto [e, d] : {std::pair<std::size_t, std::size_t>{0, 1}, {0, 2}, {1, 2}})
    EXPECT_EQ(determinant(tau_matrix(f, T1, e, d)), determinant(tau_matrix(f, T2, e, d)));
}
