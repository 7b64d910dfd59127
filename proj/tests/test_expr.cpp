#include <cmath>

#include <gtest/gtest.h>

#include "projmetric/expr.hpp"
#include "projmetric/parser.hpp"

using namespace projmetric;

namespace {

Chart example_chart() {
  return Chart({"x", "y", "z"}, {{"a", 2, {}}, {"b", 2, {}}, {"c", 2, {}}, {"h", 2, {}}});
}

}  // namespace

TEST(Expr, ParseCanonical) {
  Chart ch = example_chart();
  EXPECT_TRUE(parse_expression("0", ch).is_zero());
  EXPECT_TRUE(parse_expression("x*x - x^2", ch).is_zero());
  Expr e = parse_expression("(1/2)*a - (1/4)*b", ch);
  EXPECT_EQ(e, Expr(Rat(1, 2)) * ch.f("a") - Expr(Rat(1, 4)) * ch.f("b"));
  EXPECT_EQ(parse_expression("(x^2-1)/(x-1)", ch), parse_expression("x+1", ch));
  EXPECT_EQ(parse_expression("x^-2", ch), parse_expression("1/(x*x)", ch));
}

TEST(Expr, ParseErrors) {
  Chart ch = example_chart();
  try {
    parse_expression("x + q", ch);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.kind(), ParseError::Kind::UnknownIdentifier);
    EXPECT_EQ(e.position(), 4u);
  }
  try {
    parse_expression("x/(y-y)", ch);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.kind(), ParseError::Kind::DivisionByZero);
  }
  EXPECT_THROW(parse_expression("a'", ch), ParseError);
  EXPECT_THROW(parse_expression("x +", ch), ParseError);
  EXPECT_THROW(parse_expression("1.5*x", ch), ParseError);
  EXPECT_THROW(parse_expression("(x", ch), ParseError);
}

TEST(Expr, Differentiation) {
  Chart ch = example_chart();
  Expr c = ch.f("c");
  EXPECT_EQ(ch.differentiate(c, 2), ch.f("c", 1));
  EXPECT_EQ(ch.differentiate(c * ch.f("c", 1), 2), ch.f("c", 1).pow(2) + c * ch.f("c", 2));
  EXPECT_EQ(ch.differentiate(ch.f("h", 1) * ch.x(0), 0), ch.f("h", 1));
  EXPECT_TRUE(ch.differentiate(c, 0).is_zero());
  Expr q = parse_expression("x*y/(z+h)", ch);
  EXPECT_EQ(ch.differentiate(ch.differentiate(q, 0), 2), ch.differentiate(ch.differentiate(q, 2), 0));
}

TEST(Expr, ZeroTesting) {
  Chart ch = example_chart();
  Expr c = ch.f("c");
  EXPECT_FALSE((ch.f("c", 2) * c - ch.f("c", 1).pow(2)).is_zero());
  EXPECT_TRUE(parse_expression("x*y - y*x", ch).is_zero());
}

TEST(Expr, ExponentialSymbols) {
  Chart ch({"x", "y", "z"}, {{"c", 2, {}}}, {"k"});
  ch.set_exp_rate(0, ch.param("k"));
  Expr c = ch.f("c");
  Expr c1 = ch.differentiate(c, 2);
  Expr c2 = ch.differentiate(c1, 2);
  EXPECT_TRUE((c2 * c - c1 * c1).is_zero());
}

TEST(Expr, Evaluate) {
  Chart ch = example_chart();
  NumericEnv env;
  env.functions.resize(4);
  env.functions[0] = [](double t, int k, double* d) {
    d[0] = t;
    for (int i = 1; i <= k; ++i) d[i] = i == 1 ? 1.0 : 0.0;
  };
  env.functions[3] = [](double t, int k, double* d) {
    for (int i = 0; i <= k; ++i) d[i] = std::exp(t);
  };
  double p3[] = {0.0, 0.0, 3.0};
  EXPECT_DOUBLE_EQ(evaluate(parse_expression("z^2", ch), ch, p3, env), 9.0);
  Expr tau = Expr(Rat(-9, 8192)) * ch.f("a", 1).pow(6);
  EXPECT_DOUBLE_EQ(evaluate(tau, ch, p3, env), -9.0 / 8192.0);
  double p0[] = {0.0, 0.0, 0.0};
  Expr r = ch.f("h", 1) / (Expr(2L) * ch.f("h"));
  EXPECT_DOUBLE_EQ(evaluate(r, ch, p0, env), 0.5);
  double pole[] = {1.0, 0.0, 0.0};
  EXPECT_THROW(evaluate(parse_expression("1/(x-1)", ch), ch, pole, env), EvaluationError);
  EXPECT_THROW(evaluate(ch.f("b"), ch, p0, env), EvaluationError);
}
