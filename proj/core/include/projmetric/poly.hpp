#pragma once

#include <chrono>
#include <optional>
#include <stdexcept>

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <boost/container/small_vector.hpp>
#include <gmpxx.h>

namespace projmetric {

using Int = mpz_class;
using Rat = mpq_class;

enum class VarKind : std::uint32_t { Coordinate = 0, Function = 1, Parameter = 2, Auxiliary = 3 };

// Packed indeterminate key: kind in the top bits, then symbol index, then
// derivative order. Smaller keys come first in the lexicographic tiebreak.
struct Var {
  std::uint32_t key = 0;

  static constexpr Var make(VarKind kind, std::uint32_t index, std::uint32_t order = 0) {
    return Var{(static_cast<std::uint32_t>(kind) << 28) | (index << 16) | order};
  }
  constexpr VarKind kind() const { return static_cast<VarKind>(key >> 28); }
  constexpr std::uint32_t index() const { return (key >> 16) & 0xfffu; }
  constexpr std::uint32_t order() const { return key & 0xffffu; }
  constexpr Var with_order(std::uint32_t k) const { return make(kind(), index(), k); }
  friend constexpr bool operator==(Var a, Var b) { return a.key == b.key; }
  friend constexpr bool operator<(Var a, Var b) { return a.key < b.key; }
};

struct VarPow {
  std::uint32_t var;
  std::uint32_t exp;
  friend bool operator==(const VarPow& a, const VarPow& b) { return a.var == b.var && a.exp == b.exp; }
};

class Monomial {
 public:
  using Factors = boost::container::small_vector<VarPow, 4>;

  Monomial() = default;
  static Monomial of(Var v, std::uint32_t e = 1);

  const Factors& factors() const { return f_; }
  std::uint32_t degree() const { return deg_; }
  bool is_one() const { return f_.empty(); }
  std::uint32_t exponent(Var v) const;

  Monomial operator*(const Monomial& o) const;
  // Requires o | *this.
  Monomial operator/(const Monomial& o) const;
  bool divisible_by(const Monomial& o) const;
  Monomial without(Var v) const;
  Monomial with_exponent(Var v, std::uint32_t e) const;

  friend bool operator==(const Monomial& a, const Monomial& b) { return a.deg_ == b.deg_ && a.f_ == b.f_; }
  friend Monomial gcd(const Monomial& a, const Monomial& b);

 private:
  friend class Poly;
  Factors f_;
  std::uint32_t deg_ = 0;
};

// Graded lexicographic comparison: >0 if a > b.
int compare(const Monomial& a, const Monomial& b);

struct Term {
  Monomial mono;
  Int coef;
};

// Sparse polynomial with integer coefficients, terms sorted by descending
// graded-lex order, no zero coefficients.
class Poly {
 public:
  Poly() = default;
  Poly(long c);
  explicit Poly(const Int& c);
  static Poly var(Var v, std::uint32_t e = 1);
  static Poly monomial(const Monomial& m, const Int& c);
  static Poly from_terms(std::vector<Term> terms);  // any order, duplicates merged

  const std::vector<Term>& terms() const { return t_; }
  std::size_t size() const { return t_.size(); }
  bool is_zero() const { return t_.empty(); }
  bool is_constant() const { return t_.empty() || (t_.size() == 1 && t_[0].mono.is_one()); }
  bool is_one() const;
  bool is_monomial() const { return t_.size() == 1; }
  Int constant_value() const;  // requires is_constant
  const Int& lc() const { return t_.front().coef; }
  const Monomial& lm() const { return t_.front().mono; }
  std::uint32_t total_degree() const;

  std::uint32_t degree(Var v) const;
  std::vector<Var> variables() const;
  bool contains(Var v) const;

  Poly operator-() const;
  Poly& operator+=(const Poly& o);
  Poly& operator-=(const Poly& o);
  Poly& operator*=(const Poly& o);
  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator*(const Poly& a, const Poly& b);
  Poly scaled(const Int& c) const;
  Poly times_monomial(const Monomial& m, const Int& c) const;
  Poly pow(unsigned e) const;
  // Divide all coefficients by c, which must divide each of them.
  Poly divided_exact(const Int& c) const;

  friend bool operator==(const Poly& a, const Poly& b);
  friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

  Poly derivative(Var v) const;
  // Coefficients in v: result[k] multiplies v^k.
  std::vector<Poly> coefficients_in(Var v) const;
  static Poly from_coefficients(Var v, const std::vector<Poly>& coeffs);
  Poly substitute(Var v, const Poly& value) const;
  Poly evaluate_at(Var v, const Int& value) const;
  Rat evaluate(const std::function<Rat(Var)>& value) const;

  Int content() const;  // positive gcd of coefficients (0 for zero poly)
  Monomial monomial_content() const;
  Poly primitive_part() const;  // content removed, leading coefficient > 0
  std::size_t max_coef_bits() const;

  std::string to_string(const std::function<std::string(Var)>& name) const;

 private:
  std::vector<Term> t_;
};

// Exact division test. On success stores p / d in *q (if non-null).
bool divides(const Poly& d, const Poly& p, Poly* q = nullptr);
// Requires d | p.
Poly exact_div(const Poly& p, const Poly& d);
// Greatest common divisor with positive leading coefficient (0 iff both zero).
Poly gcd(const Poly& a, const Poly& b);
// Pseudo-remainder of f by g as polynomials in v.
Poly pseudo_remainder(const Poly& f, const Poly& g, Var v);

class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded() : std::runtime_error("exact computation exceeded its time budget") {}
};

// Deadline for exact polynomial arithmetic on the calling thread; GCD and
// remainder loops throw BudgetExceeded once it has passed.
class ScopedDeadline {
 public:
  explicit ScopedDeadline(double seconds);
  ~ScopedDeadline();
  ScopedDeadline(const ScopedDeadline&) = delete;
  ScopedDeadline& operator=(const ScopedDeadline&) = delete;

 private:
  std::optional<std::chrono::steady_clock::time_point> previous_;
};

void check_deadline();

}  // namespace projmetric
