#pragma once

#include <memory>
#include <span>
#include <vector>

#include "projmetric/expr.hpp"

namespace projmetric {

// Monomial index tables for truncated Taylor series in n variables up to a
// fixed total order. Coefficients are normalized (d^alpha f / alpha!).
class JetLayout {
 public:
  JetLayout(std::size_t n, int order);
  static std::shared_ptr<const JetLayout> get(std::size_t n, int order);

  std::size_t dim() const { return n_; }
  int order() const { return order_; }
  std::size_t size() const { return exps_.size(); }
  std::size_t size_up_to(int order) const { return offsets_[static_cast<std::size_t>(order) + 1]; }
  const std::vector<int>& exponents(std::size_t i) const { return exps_[i]; }
  int degree(std::size_t i) const { return deg_[i]; }
  std::size_t index_of(const std::vector<int>& e) const;
  std::size_t unit(std::size_t a) const { return 1 + a; }

  struct Triple {
    std::uint32_t i, j, k;
  };
  // Products x^i * x^j = x^k with deg k <= order, grouped by k.
  const std::vector<Triple>& triples() const { return triples_; }
  // Start offset of triples for target k.
  std::size_t triples_begin(std::size_t k) const { return tstart_[k]; }
  std::size_t triples_end(std::size_t k) const { return tstart_[k + 1]; }

  struct Shift {
    std::uint32_t src, dst;
    double factor;
  };
  const std::vector<Shift>& derivative_map(std::size_t a) const { return dmaps_[a]; }

 private:
  std::size_t n_;
  int order_;
  std::vector<std::vector<int>> exps_;
  std::vector<int> deg_;
  std::vector<std::size_t> offsets_;
  std::vector<Triple> triples_;
  std::vector<std::size_t> tstart_;
  std::vector<std::vector<Shift>> dmaps_;
};

class Jet {
 public:
  Jet() = default;
  Jet(const JetLayout* layout, int order) : L_(layout), order_(order), c_(layout->size_up_to(order), 0.0) {}
  static Jet constant(const JetLayout* layout, int order, double v);
  static Jet coordinate(const JetLayout* layout, int order, std::size_t a, double v);

  const JetLayout* layout() const { return L_; }
  int order() const { return order_; }
  double value() const { return c_.empty() ? 0.0 : c_[0]; }
  double coef(std::size_t i) const { return i < c_.size() ? c_[i] : 0.0; }
  double& coef_ref(std::size_t i) { return c_[i]; }
  std::size_t size() const { return c_.size(); }
  // d^alpha f at the expansion point (alpha! times the coefficient).
  double partial(const std::vector<int>& alpha) const;

  Jet truncated(int order) const;
  Jet derivative(std::size_t a) const;

  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);
  Jet& operator*=(double s);
  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }
  friend Jet operator*(const Jet& a, const Jet& b);
  friend Jet operator/(const Jet& a, const Jet& b);
  Jet operator-() const;

 private:
  const JetLayout* L_ = nullptr;
  int order_ = 0;
  std::vector<double> c_;
};

// Expression compiled for repeated numeric evaluation (double or jet) with
// a fixed chart and numeric environment.
class CompiledExpr {
 public:
  CompiledExpr() = default;
  CompiledExpr(const Expr& e, const Chart& chart);

  bool is_zero() const { return num_.empty(); }
  const std::vector<std::uint32_t>& variables() const { return vars_; }

  struct Term {
    double coef;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pows;  // (Var key, exponent)
  };
  const std::vector<Term>& num() const { return num_; }
  const std::vector<Term>& den() const { return den_; }

 private:
  std::vector<std::uint32_t> vars_;
  std::vector<Term> num_, den_;
};

// Evaluates compiled expressions at one point, caching symbol jets.
class PointEvaluator {
 public:
  PointEvaluator(const Chart& chart, const NumericEnv& env, std::span<const double> point, int order);

  int order() const { return order_; }
  const JetLayout* layout() const { return layout_.get(); }
  Jet jet(const CompiledExpr& e);
  double value(const CompiledExpr& e);

 private:
  const Chart& chart_;
  const NumericEnv& env_;
  std::vector<double> point_;
  int order_;
  std::shared_ptr<const JetLayout> layout_;
  std::vector<std::pair<std::uint32_t, std::vector<Jet>>> cache_;  // var key -> powers
  const Jet& power(std::uint32_t var, std::uint32_t e);
  Jet symbol_jet(std::uint32_t var);
};

}  // namespace projmetric
