#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "projmetric/tensor.hpp"

namespace projmetric {

// Differential k-form in the coordinate coframe. Components are stored as a
// fully antisymmetric array, ω = Σ_{i1<...<ik} ω_{i1...ik} dx^i1∧...∧dx^ik.
class ScalarForm {
 public:
  ScalarForm() = default;
  ScalarForm(std::size_t n, std::size_t k);
  static ScalarForm function(std::size_t n, const Expr& f);
  static ScalarForm one_form(const std::vector<Expr>& c);
  // From a rank-2 covariant tensor; only the antisymmetric part is kept.
  static ScalarForm two_form(const Tensor<Expr>& t);

  std::size_t dim() const { return c_.dim(); }
  std::size_t degree() const { return c_.rank(); }
  const Tensor<Expr>& components() const { return c_; }
  template <class... I>
  const Expr& operator()(I... idx) const {
    return c_(idx...);
  }
  // Sets one component and its antisymmetric images.
  void set(std::span<const std::size_t> idx, const Expr& v);
  bool is_zero() const;

  friend ScalarForm operator+(const ScalarForm& a, const ScalarForm& b);
  friend ScalarForm operator-(const ScalarForm& a, const ScalarForm& b);
  friend ScalarForm operator*(const Expr& s, const ScalarForm& a);
  friend bool operator==(const ScalarForm& a, const ScalarForm& b);

 private:
  Tensor<Expr> c_;
};

class NotClosed : public std::runtime_error {
 public:
  NotClosed() : std::runtime_error("form is not closed") {}
};

ScalarForm exterior_derivative(const ScalarForm& w, const Chart& chart);

// True when e depends on coordinate a, directly or through a function
// symbol with that argument.
bool depends_on(const Expr& e, std::size_t a, const Chart& chart);

// Term-wise antiderivative in coordinate a. Handles powers of x^a, formal
// derivatives f^(k) -> f^(k-1), f^(k) (f^(k-1))^p, and exp-type symbols,
// with coefficients independent of x^a. Absent outside that class.
std::optional<Expr> antiderivative(const Expr& e, std::size_t a, const Chart& chart);

// Symbolic primitive λ with dλ = ω for closed forms of degree 1 or 2.
// Throws NotClosed. Absent when the symbolic search fails.
std::optional<ScalarForm> find_primitive(const ScalarForm& omega, const Chart& chart);

// A = -1/2 Σ c_i d log u_i with rational c_i: the conformal factor
// e^{2φ} = Π u_i^{-c_i} (φ the potential of A) is returned exactly when all
// exponents are integers.
struct LogGradient {
  std::vector<std::pair<Expr, Rat>> factors;  // (u_i, c_i)
  std::optional<Expr> conformal_factor;
};
std::optional<LogGradient> recognize_log_gradient(const ScalarForm& A, const Chart& chart);

// Numeric line integral of a 1-form along the axis-parallel polyline that
// moves coordinates in increasing index order.
double line_integral(const ScalarForm& A, const Chart& chart, const NumericEnv& env, std::span<const double> from,
                     std::span<const double> to);

}  // namespace projmetric
