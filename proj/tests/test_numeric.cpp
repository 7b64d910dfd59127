#include <cmath>

#include <gtest/gtest.h>

#include "projmetric/jet.hpp"
#include "projmetric/numeric_function.hpp"
#include "projmetric/parser.hpp"

using namespace projmetric;

TEST(NumericFunction, TaylorDerivatives) {
  double d[5];
  compile_univariate("exp(2*t)", "t")(0.3, 4, d);
  for (int k = 0; k <= 4; ++k) EXPECT_NEAR(d[k], std::pow(2.0, k) * std::exp(0.6), 1e-12);

  compile_univariate("sin(t)", "t")(1.1, 3, d);
  EXPECT_NEAR(d[0], std::sin(1.1), 1e-14);
  EXPECT_NEAR(d[1], std::cos(1.1), 1e-14);
  EXPECT_NEAR(d[2], -std::sin(1.1), 1e-14);
  EXPECT_NEAR(d[3], -std::cos(1.1), 1e-14);

  compile_univariate("k*t^3 - 1/t", "t", {{"k", 2.0}})(2.0, 3, d);
  EXPECT_NEAR(d[0], 16 - 0.5, 1e-13);
  EXPECT_NEAR(d[1], 24 + 0.25, 1e-13);
  EXPECT_NEAR(d[2], 24 - 0.25, 1e-13);
  EXPECT_NEAR(d[3], 12 + 0.375, 1e-13);

  compile_univariate("sqrt(t)*log(t)", "t")(4.0, 1, d);
  EXPECT_NEAR(d[1], std::log(4.0) / 4.0 + 0.5, 1e-13);

  compile_univariate("t^1.5", "t")(4.0, 2, d);
  EXPECT_NEAR(d[2], 0.75 / 2.0, 1e-13);
}

TEST(NumericFunction, Errors) {
  EXPECT_THROW(compile_univariate("foo(t)", "t"), std::invalid_argument);
  EXPECT_THROW(compile_univariate("q*t", "t"), std::invalid_argument);
  double d[2];
  EXPECT_THROW(compile_univariate("log(t)", "t")(-1.0, 1, d), EvaluationError);
  EXPECT_NEAR(evaluate_elementary("cosh(u)^2 - sinh(u)^2", {{"u", 0.7}}), 1.0, 1e-13);
}

TEST(Jet, ProductAndQuotient) {
  auto L = JetLayout::get(3, 3);
  Jet x = Jet::coordinate(L.get(), 3, 0, 0.5);
  Jet y = Jet::coordinate(L.get(), 3, 1, -1.0);
  Jet z = Jet::coordinate(L.get(), 3, 2, 2.0);
  Jet f = x * x * y + z;
  EXPECT_DOUBLE_EQ(f.value(), -0.25 + 2.0);
  EXPECT_DOUBLE_EQ(f.partial({1, 0, 0}), 2 * 0.5 * -1.0);
  EXPECT_DOUBLE_EQ(f.partial({2, 1, 0}), 2.0);
  Jet one = Jet::constant(L.get(), 3, 1.0);
  Jet g = one / (one + x);
  for (int k = 0; k <= 3; ++k) {
    double fact = 1;
    for (int i = 2; i <= k; ++i) fact *= i;
    EXPECT_NEAR(g.partial({k, 0, 0}), fact * std::pow(-1.0, k) / std::pow(1.5, k + 1), 1e-13);
  }
  Jet q = (f * g) / g;
  for (std::size_t i = 0; i < q.size(); ++i) EXPECT_NEAR(q.coef(i), f.coef(i), 1e-13);
  Jet dfx = f.derivative(0);
  EXPECT_EQ(dfx.order(), 2);
  EXPECT_DOUBLE_EQ(dfx.partial({1, 1, 0}), 2.0);
}

TEST(Jet, CompiledExpressionMatchesSymbolicDerivatives) {
  Chart ch({"x", "y", "z"}, {{"h", 2, {}}}, {"k"});
  Expr e = parse_expression("(x*h + k*y^2)/(1 + z*z)", ch);
  NumericEnv env;
  env.functions.push_back(compile_univariate("exp(t)", "t"));
  env.parameters.push_back(3.0);
  std::vector<double> pt{0.4, -0.3, 0.8};
  PointEvaluator ev(ch, env, pt, 2);
  Jet j = ev.jet(CompiledExpr(e, ch));
  EXPECT_NEAR(j.value(), evaluate(e, ch, pt, env), 1e-13);
  for (std::size_t a = 0; a < 3; ++a) {
    Expr da = ch.differentiate(e, a);
    std::vector<int> alpha(3, 0);
    alpha[a] = 1;
    EXPECT_NEAR(j.partial(alpha), evaluate(da, ch, pt, env), 1e-12);
    for (std::size_t b = 0; b < 3; ++b) {
      std::vector<int> beta = alpha;
      beta[b] += 1;
      EXPECT_NEAR(j.partial(beta), evaluate(ch.differentiate(da, b), ch, pt, env), 1e-11);
    }
  }
  EXPECT_NEAR(ev.value(CompiledExpr(e, ch)), j.value(), 1e-14);
}
