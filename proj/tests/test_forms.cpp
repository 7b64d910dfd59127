#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "projmetric/forms.hpp"
#include "projmetric/numeric_function.hpp"

using namespace projmetric;
using namespace fixtures;

namespace {

Expr P(const Chart& ch, const char* s) { return parse_expression(s, ch); }

}  // namespace

TEST(Forms, ExteriorDerivativeSquaresToZero) {
  std::mt19937 rng(17);
  Chart ch = coords_chart(4);
  ScalarForm f = ScalarForm::function(4, random_poly(rng, ch, 3));
  auto d1 = exterior_derivative(f, ch);
  EXPECT_TRUE(exterior_derivative(d1, ch).is_zero());
  std::vector<Expr> c(4);
  for (auto& e : c) e = random_poly(rng, ch, 2);
  auto w = ScalarForm::one_form(c);
  auto dw = exterior_derivative(w, ch);
  EXPECT_FALSE(dw.is_zero());
  EXPECT_TRUE(exterior_derivative(dw, ch).is_zero());
  EXPECT_EQ(dw(0, 1), ch.differentiate(c[1], 0) - ch.differentiate(c[0], 1));
  EXPECT_EQ(dw(1, 0), -dw(0, 1));
}

TEST(Forms, PrimitiveOfExactPolynomialForms) {
  std::mt19937 rng(23);
  Chart ch = coords_chart(3);
  for (int trial = 0; trial < 5; ++trial) {
    Expr lam = random_poly(rng, ch, 3);
    auto w = exterior_derivative(ScalarForm::function(3, lam), ch);
    auto p = find_primitive(w, ch);
    ASSERT_TRUE(p.has_value());
    EXPECT_EQ(exterior_derivative(*p, ch), w);
    // Unique up to a constant.
    EXPECT_TRUE(((*p)() - lam).is_constant());

    std::vector<Expr> c(3);
    for (auto& e : c) e = random_poly(rng, ch, 2);
    auto om = exterior_derivative(ScalarForm::one_form(c), ch);
    auto q = find_primitive(om, ch);
    ASSERT_TRUE(q.has_value());
    EXPECT_EQ(exterior_derivative(*q, ch), om);
  }
}

TEST(Forms, NotClosedThrows) {
  Chart ch = coords_chart(2);
  auto w = ScalarForm::one_form({ch.x(1), Expr()});
  EXPECT_THROW(find_primitive(w, ch), NotClosed);
  EXPECT_THROW(find_primitive(ScalarForm::function(2, Expr(1)), ch), std::invalid_argument);
}

TEST(Forms, PrimitiveWithFunctionSymbols) {
  Chart ch = xyz_chart({"h"}, {"g12"});
  Expr h = ch.f("h"), h1 = ch.f("h", 1);
  auto w = ScalarForm::one_form({Expr(), Expr(), Expr(2) * ch.param("g12") * h1});
  auto p = find_primitive(w, ch);
  ASSERT_TRUE(p.has_value());
  EXPECT_EQ((*p)(), Expr(2) * ch.param("g12") * h);

  auto z = ScalarForm(3, 1);
  auto pz = find_primitive(z, ch);
  ASSERT_TRUE(pz.has_value());
  EXPECT_TRUE(pz->is_zero());

  // h'' h'^2 dz -> h'^3/3
  auto w2 = ScalarForm::one_form({Expr(), Expr(), ch.f("h", 2) * h1 * h1});
  auto p2 = find_primitive(w2, ch);
  ASSERT_TRUE(p2.has_value());
  EXPECT_EQ((*p2)(), Expr(Rat(1, 3)) * h1.pow(3));

  // A logarithmic primitive is outside the rational class.
  auto w3 = ScalarForm::one_form({Expr(), Expr(), -h1 / (Expr(2) * h)});
  EXPECT_FALSE(find_primitive(w3, ch).has_value());
}

TEST(Forms, ExpTypeAntiderivative) {
  Chart ch = xyz_chart({"e"}, {"k"});
  ch.set_exp_rate(0, ch.param("k"));
  Expr e = ch.f("e");
  auto F = antiderivative(e.pow(2) * ch.x(0), 2, ch);
  ASSERT_TRUE(F.has_value());
  EXPECT_EQ(ch.differentiate(*F, 2), e.pow(2) * ch.x(0));
}

TEST(Forms, TwoFormPrimitive) {
  Chart ch = coords_chart(3);
  std::mt19937 rng(31);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<Expr> c(3);
    for (auto& e : c) e = random_poly(rng, ch, 3, 0.3);
    auto om = exterior_derivative(ScalarForm::one_form(c), ch);
    auto q = find_primitive(om, ch);
    ASSERT_TRUE(q.has_value());
    EXPECT_EQ(exterior_derivative(*q, ch), om);
  }
  Chart ch2 = xyz_chart({"a"});
  Tensor<Expr> t(3, "dd");
  t(0, 2) = ch2.f("a", 1) * ch2.x(1);
  t(2, 0) = -t(0, 2);
  t(1, 2) = ch2.f("a", 1) * ch2.x(0);
  t(2, 1) = -t(1, 2);
  auto om = ScalarForm::two_form(t);
  ASSERT_TRUE(exterior_derivative(om, ch2).is_zero());
  auto q = find_primitive(om, ch2);
  ASSERT_TRUE(q.has_value());
  EXPECT_EQ(exterior_derivative(*q, ch2), om);
}

TEST(Forms, LogGradientRecognition) {
  Chart ch = xyz_chart({"h"});
  Expr h = ch.f("h"), h1 = ch.f("h", 1);
  // A = -h'/(2h) dz: e^{2φ} = 1/h.
  auto A = ScalarForm::one_form({Expr(), Expr(), -h1 / (Expr(2) * h)});
  auto lg = recognize_log_gradient(A, ch);
  ASSERT_TRUE(lg.has_value());
  ASSERT_TRUE(lg->conformal_factor.has_value());
  EXPECT_EQ(*lg->conformal_factor, h.inverse());

  Chart c3 = coords_chart(3);
  Expr x = c3.x(0), y = c3.x(1);
  Expr u = Expr(1) + x * x + y * y;
  Expr w = u.pow(-2) * x.pow(3);
  std::vector<Expr> comps(3);
  for (std::size_t a = 0; a < 3; ++a) comps[a] = Expr(Rat(1, 2)) * c3.differentiate(w, a) / w;
  auto lg2 = recognize_log_gradient(ScalarForm::one_form(comps), c3);
  ASSERT_TRUE(lg2.has_value());
  ASSERT_TRUE(lg2->conformal_factor.has_value());
  EXPECT_EQ(*lg2->conformal_factor, w);

  // Half-integer exponent: factors only.
  std::vector<Expr> half(3);
  half[0] = Expr(Rat(1, 4)) / x;
  auto lg3 = recognize_log_gradient(ScalarForm::one_form(half), c3);
  ASSERT_TRUE(lg3.has_value());
  EXPECT_FALSE(lg3->conformal_factor.has_value());
  ASSERT_EQ(lg3->factors.size(), 1u);
  EXPECT_EQ(lg3->factors[0].second, Rat(-1, 2));

  // Not a gradient of a log.
  std::vector<Expr> bad(3);
  bad[0] = y / (Expr(1) + x * x);
  EXPECT_FALSE(recognize_log_gradient(ScalarForm::one_form(bad), c3).has_value());
}

TEST(Forms, LineIntegralMatchesPotential) {
  Chart ch = coords_chart(3);
  Expr lam = P(ch, "x1^2*x2 - 3*x3 + x2*x3^3");
  auto w = exterior_derivative(ScalarForm::function(3, lam), ch);
  NumericEnv env;
  std::vector<double> a{0.1, -0.4, 0.3}, b{1.2, 0.5, -0.7};
  double I = line_integral(w, ch, env, a, b);
  EXPECT_NEAR(I, evaluate(lam, ch, b, env) - evaluate(lam, ch, a, env), 1e-12);

  Chart c2 = xyz_chart({"h"});
  NumericEnv e2;
  e2.functions = {compile_univariate("2+sin(t)", "t")};
  auto A = ScalarForm::one_form({Expr(), Expr(), c2.f("h", 1) / c2.f("h")});
  std::vector<double> p{0, 0, 0.2}, q{0, 0, 1.5};
  EXPECT_NEAR(line_integral(A, c2, e2, p, q), std::log((2 + std::sin(1.5)) / (2 + std::sin(0.2))), 1e-12);
}
