#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "projmetric/poly.hpp"

namespace projmetric {

// Canonical rational function num/den over Z: gcd(num, den) = 1, den has a
// positive leading coefficient, zero is 0/1.
class Expr {
 public:
  Expr() = default;
  Expr(long c);
  Expr(const Rat& c);
  Expr(const Poly& p);
  static Expr fraction(const Poly& num, const Poly& den);

  const Poly& num() const;
  const Poly& den() const;
  bool is_zero() const { return !r_; }
  bool is_constant() const;
  bool is_polynomial() const;
  Rat constant_value() const;  // requires is_constant
  std::size_t size() const;    // total term count

  Expr operator-() const;
  Expr& operator+=(const Expr& o) { return *this = *this + o; }
  Expr& operator-=(const Expr& o) { return *this = *this - o; }
  Expr& operator*=(const Expr& o) { return *this = *this * o; }
  Expr& operator/=(const Expr& o) { return *this = *this / o; }
  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);  // throws std::domain_error on zero
  Expr pow(int e) const;
  Expr inverse() const;

  friend bool operator==(const Expr& a, const Expr& b);
  friend bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }

  Expr substitute(Var v, const Expr& value) const;
  std::vector<Var> variables() const;

 private:
  struct Rep {
    Poly num, den;
  };
  explicit Expr(std::shared_ptr<const Rep> r) : r_(std::move(r)) {}
  static Expr make_raw(Poly num, Poly den);
  std::shared_ptr<const Rep> r_;
};

bool is_zero(const Expr& e);

struct FunctionSymbol {
  std::string name;
  std::size_t arg = 0;            // coordinate index of the argument
  std::optional<Expr> exp_rate;   // if set: f' = rate * f, rate in parameters and the argument
};

// Coordinates, registered univariate function symbols and constant
// parameters. Function symbols are kept sorted by name.
class Chart {
 public:
  Chart() = default;
  Chart(std::vector<std::string> coordinates, std::vector<FunctionSymbol> functions = {},
        std::vector<std::string> parameters = {});

  std::size_t dimension() const { return coords_.size(); }
  const std::vector<std::string>& coordinate_names() const { return coords_; }
  const std::vector<FunctionSymbol>& functions() const { return funcs_; }
  const std::vector<std::string>& parameters() const { return params_; }

  Var coordinate(std::size_t i) const { return Var::make(VarKind::Coordinate, static_cast<std::uint32_t>(i)); }
  Var function(std::size_t f, std::uint32_t order = 0) const {
    return Var::make(VarKind::Function, static_cast<std::uint32_t>(f), order);
  }
  Var parameter(std::size_t p) const { return Var::make(VarKind::Parameter, static_cast<std::uint32_t>(p)); }

  Expr x(std::size_t i) const { return Expr(Poly::var(coordinate(i))); }
  Expr f(std::size_t fn, std::uint32_t order = 0) const;
  Expr f(const std::string& name, std::uint32_t order = 0) const;
  Expr param(const std::string& name) const;

  std::optional<std::size_t> coordinate_index(const std::string& name) const;
  std::optional<std::size_t> function_index(const std::string& name) const;
  std::optional<std::size_t> parameter_index(const std::string& name) const;
  void set_exp_rate(std::size_t fn, const Expr& rate);

  // Human-readable symbol name: a, a', a'', a^(3).
  std::string name(Var v) const;

  Expr differentiate(const Expr& e, std::size_t coord) const;

 private:
  std::vector<std::string> coords_;
  std::vector<FunctionSymbol> funcs_;
  std::vector<std::string> params_;
};

std::string to_string(const Expr& e, const Chart& chart);
std::string to_string(const Expr& e, const std::function<std::string(Var)>& name);

// Numeric implementations: for each function symbol index, a callback
// filling derivs[0..max_order] at t; parameter values by index.
using UnivariateFn = std::function<void(double t, int max_order, double* derivs)>;
struct NumericEnv {
  std::vector<UnivariateFn> functions;
  std::vector<double> parameters;  // NaN: no value, evaluation throws
};

class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Exact rational evaluation of the canonical form at the given IEEE inputs,
// rounded once to double.
double evaluate(const Expr& e, const Chart& chart, std::span<const double> point, const NumericEnv& env);

}  // namespace projmetric
