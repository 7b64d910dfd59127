#include "projmetric/numeric_function.hpp"

#include <cctype>
#include <cmath>
#include <memory>
#include <numbers>
#include <vector>

namespace projmetric {

namespace {

struct Node {
  enum class Op { Const, Var, Add, Sub, Mul, Div, Neg, Pow, Call } op;
  double value = 0;
  std::string name;
  std::unique_ptr<Node> lhs, rhs;
};
using NodePtr = std::unique_ptr<Node>;

NodePtr make(Node::Op op, NodePtr l = nullptr, NodePtr r = nullptr) {
  auto n = std::make_unique<Node>();
  n->op = op;
  n->lhs = std::move(l);
  n->rhs = std::move(r);
  return n;
}

class ElementaryParser {
 public:
  explicit ElementaryParser(std::string_view s) : s_(s) {}
  NodePtr parse() {
    NodePtr n = sum();
    skip();
    if (pos_ < s_.size()) fail("unexpected character");
    return n;
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& m) {
    throw std::invalid_argument("numeric expression: " + m + " at position " + std::to_string(pos_));
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  char peek() {
    skip();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }
  NodePtr sum() {
    NodePtr a = product();
    for (;;) {
      char c = peek();
      if (c == '+' || c == '-') {
        ++pos_;
        a = make(c == '+' ? Node::Op::Add : Node::Op::Sub, std::move(a), product());
      } else {
        return a;
      }
    }
  }
  NodePtr product() {
    NodePtr a = unary();
    for (;;) {
      char c = peek();
      if (c == '*' || c == '/') {
        ++pos_;
        a = make(c == '*' ? Node::Op::Mul : Node::Op::Div, std::move(a), unary());
      } else {
        return a;
      }
    }
  }
  NodePtr unary() {
    char c = peek();
    if (c == '-') {
      ++pos_;
      return make(Node::Op::Neg, unary());
    }
    if (c == '+') {
      ++pos_;
      return unary();
    }
    return power();
  }
  NodePtr power() {
    NodePtr b = primary();
    if (peek() == '^') {
      ++pos_;
      return make(Node::Op::Pow, std::move(b), unary());
    }
    return b;
  }
  NodePtr primary() {
    char c = peek();
    if (c == '(') {
      ++pos_;
      NodePtr n = sum();
      if (peek() != ')') fail("expected ')'");
      ++pos_;
      return n;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      char* end = nullptr;
      std::string tmp(s_.substr(pos_));
      double v = std::strtod(tmp.c_str(), &end);
      std::size_t used = static_cast<std::size_t>(end - tmp.c_str());
      if (used == 0) fail("bad number");
      pos_ += used;
      auto n = make(Node::Op::Const);
      n->value = v;
      return n;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      std::string name(s_.substr(start, pos_ - start));
      if (peek() == '(') {
        ++pos_;
        NodePtr arg = sum();
        if (peek() != ')') fail("expected ')'");
        ++pos_;
        auto n = make(Node::Op::Call, std::move(arg));
        n->name = name;
        return n;
      }
      auto n = make(Node::Op::Var);
      n->name = name;
      return n;
    }
    fail("unexpected input");
  }
};

using Series = std::vector<double>;  // normalized Taylor coefficients

Series mul(const Series& a, const Series& b) {
  Series c(a.size(), 0.0);
  for (std::size_t k = 0; k < c.size(); ++k)
    for (std::size_t j = 0; j <= k; ++j) c[k] += a[j] * b[k - j];
  return c;
}

Series divide(const Series& a, const Series& b) {
  if (b[0] == 0.0) throw EvaluationError("division by zero in numeric function");
  Series c(a.size(), 0.0);
  for (std::size_t k = 0; k < c.size(); ++k) {
    double s = a[k];
    for (std::size_t j = 1; j <= k; ++j) s -= b[j] * c[k - j];
    c[k] = s / b[0];
  }
  return c;
}

Series exp_series(const Series& a) {
  Series e(a.size(), 0.0);
  e[0] = std::exp(a[0]);
  for (std::size_t k = 1; k < e.size(); ++k) {
    double s = 0;
    for (std::size_t j = 1; j <= k; ++j) s += static_cast<double>(j) * a[j] * e[k - j];
    e[k] = s / static_cast<double>(k);
  }
  return e;
}

Series log_series(const Series& a) {
  if (a[0] <= 0.0) throw EvaluationError("log of non-positive value in numeric function");
  Series l(a.size(), 0.0);
  l[0] = std::log(a[0]);
  for (std::size_t k = 1; k < l.size(); ++k) {
    double s = 0;
    for (std::size_t j = 1; j < k; ++j) s += static_cast<double>(j) * l[j] * a[k - j];
    l[k] = (a[k] - s / static_cast<double>(k)) / a[0];
  }
  return l;
}

void sincos_series(const Series& a, Series& s, Series& c) {
  s.assign(a.size(), 0.0);
  c.assign(a.size(), 0.0);
  s[0] = std::sin(a[0]);
  c[0] = std::cos(a[0]);
  for (std::size_t k = 1; k < a.size(); ++k) {
    double ss = 0, cc = 0;
    for (std::size_t j = 1; j <= k; ++j) {
      ss += static_cast<double>(j) * a[j] * c[k - j];
      cc += static_cast<double>(j) * a[j] * s[k - j];
    }
    s[k] = ss / static_cast<double>(k);
    c[k] = -cc / static_cast<double>(k);
  }
}

Series pow_real(const Series& a, double r) {
  if (a[0] <= 0.0) throw EvaluationError("non-integer power of non-positive value in numeric function");
  Series p(a.size(), 0.0);
  p[0] = std::pow(a[0], r);
  for (std::size_t k = 1; k < p.size(); ++k) {
    double s = 0;
    for (std::size_t j = 1; j <= k; ++j) s += ((r + 1.0) * static_cast<double>(j) - static_cast<double>(k)) * a[j] * p[k - j];
    p[k] = s / (static_cast<double>(k) * a[0]);
  }
  return p;
}

Series pow_int(const Series& a, long e) {
  Series one(a.size(), 0.0);
  one[0] = 1.0;
  if (e < 0) return divide(one, pow_int(a, -e));
  Series r = one, base = a;
  while (e) {
    if (e & 1) r = mul(r, base);
    e >>= 1;
    if (e) base = mul(base, base);
  }
  return r;
}

struct Context {
  std::size_t len;
  const std::map<std::string, Series>* vars;
  const std::map<std::string, double>* constants;
};

Series eval(const Node& n, const Context& ctx) {
  auto constant = [&](double v) {
    Series s(ctx.len, 0.0);
    s[0] = v;
    return s;
  };
  switch (n.op) {
    case Node::Op::Const:
      return constant(n.value);
    case Node::Op::Var: {
      auto it = ctx.vars->find(n.name);
      if (it != ctx.vars->end()) return it->second;
      auto ct = ctx.constants->find(n.name);
      if (ct != ctx.constants->end()) return constant(ct->second);
      if (n.name == "pi") return constant(std::numbers::pi);
      throw std::invalid_argument("numeric expression: unknown name '" + n.name + "'");
    }
    case Node::Op::Add: {
      Series a = eval(*n.lhs, ctx), b = eval(*n.rhs, ctx);
      for (std::size_t k = 0; k < a.size(); ++k) a[k] += b[k];
      return a;
    }
    case Node::Op::Sub: {
      Series a = eval(*n.lhs, ctx), b = eval(*n.rhs, ctx);
      for (std::size_t k = 0; k < a.size(); ++k) a[k] -= b[k];
      return a;
    }
    case Node::Op::Mul:
      return mul(eval(*n.lhs, ctx), eval(*n.rhs, ctx));
    case Node::Op::Div:
      return divide(eval(*n.lhs, ctx), eval(*n.rhs, ctx));
    case Node::Op::Neg: {
      Series a = eval(*n.lhs, ctx);
      for (auto& v : a) v = -v;
      return a;
    }
    case Node::Op::Pow: {
      Series b = eval(*n.lhs, ctx), e = eval(*n.rhs, ctx);
      bool const_exp = true;
      for (std::size_t k = 1; k < e.size(); ++k) const_exp = const_exp && e[k] == 0.0;
      if (const_exp) {
        double r = e[0];
        if (r == std::round(r) && std::abs(r) < 1e6) return pow_int(b, static_cast<long>(r));
        return pow_real(b, r);
      }
      Series lb = log_series(b);
      return exp_series(mul(e, lb));
    }
    case Node::Op::Call: {
      Series a = eval(*n.lhs, ctx);
      const std::string& f = n.name;
      if (f == "exp") return exp_series(a);
      if (f == "log") return log_series(a);
      if (f == "sqrt") return pow_real(a, 0.5);
      if (f == "sin" || f == "cos" || f == "tan") {
        Series s, c;
        sincos_series(a, s, c);
        if (f == "sin") return s;
        if (f == "cos") return c;
        return divide(s, c);
      }
      if (f == "sinh" || f == "cosh") {
        Series ep = exp_series(a);
        Series neg = a;
        for (auto& v : neg) v = -v;
        Series em = exp_series(neg);
        for (std::size_t k = 0; k < ep.size(); ++k) ep[k] = 0.5 * (ep[k] + (f == "sinh" ? -em[k] : em[k]));
        return ep;
      }
      throw std::invalid_argument("numeric expression: unknown function '" + f + "'");
    }
  }
  return constant(0.0);
}

}  // namespace

UnivariateFn compile_univariate(std::string_view text, const std::string& variable,
                                const std::map<std::string, double>& constants) {
  std::shared_ptr<Node> root(ElementaryParser(text).parse().release());
  auto consts = std::make_shared<std::map<std::string, double>>(constants);
  // Validate names once.
  {
    std::map<std::string, Series> vars{{variable, Series{0.5, 1.0}}};
    Context ctx{2, &vars, consts.get()};
    try {
      eval(*root, ctx);
    } catch (const EvaluationError&) {
    }
  }
  return [root, consts, variable](double t, int max_order, double* derivs) {
    std::size_t len = static_cast<std::size_t>(max_order) + 1;
    Series x(len, 0.0);
    x[0] = t;
    if (len > 1) x[1] = 1.0;
    std::map<std::string, Series> vars{{variable, x}};
    Context ctx{len, &vars, consts.get()};
    Series s = eval(*root, ctx);
    double fact = 1.0;
    for (std::size_t k = 0; k < len; ++k) {
      if (k > 0) fact *= static_cast<double>(k);
      derivs[k] = s[k] * fact;
    }
  };
}

double evaluate_elementary(std::string_view text, const std::map<std::string, double>& values) {
  NodePtr root = ElementaryParser(text).parse();
  std::map<std::string, Series> vars;
  for (const auto& [k, v] : values) vars[k] = Series{v};
  std::map<std::string, double> none;
  Context ctx{1, &vars, &none};
  return eval(*root, ctx)[0];
}

}  // namespace projmetric
