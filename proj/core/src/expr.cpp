#include "projmetric/expr.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace projmetric {

namespace {

const Poly& one_poly() {
  static const Poly one(1L);
  return one;
}

const Poly& zero_poly() {
  static const Poly zero;
  return zero;
}

}  // namespace

Expr::Expr(long c) {
  if (c != 0) r_ = std::make_shared<const Rep>(Rep{Poly(c), Poly(1L)});
}

Expr::Expr(const Rat& c) {
  if (c != 0) r_ = std::make_shared<const Rep>(Rep{Poly(Int(c.get_num())), Poly(Int(c.get_den()))});
}

Expr::Expr(const Poly& p) {
  if (!p.is_zero()) r_ = std::make_shared<const Rep>(Rep{p, Poly(1L)});
}

Expr Expr::make_raw(Poly num, Poly den) {
  if (num.is_zero()) return Expr();
  return Expr(std::make_shared<const Rep>(Rep{std::move(num), std::move(den)}));
}

Expr Expr::fraction(const Poly& num, const Poly& den) {
  if (den.is_zero()) throw std::domain_error("division by zero expression");
  if (num.is_zero()) return Expr();
  if (den.is_one()) return Expr(num);
  Poly g = gcd(num, den);
  Poly n = g.is_one() ? num : exact_div(num, g);
  Poly d = g.is_one() ? den : exact_div(den, g);
  if (d.lc() < 0) {
    n = -n;
    d = -d;
  }
  return make_raw(std::move(n), std::move(d));
}

const Poly& Expr::num() const { return r_ ? r_->num : zero_poly(); }
const Poly& Expr::den() const { return r_ ? r_->den : one_poly(); }

bool Expr::is_constant() const { return !r_ || (r_->num.is_constant() && r_->den.is_constant()); }
bool Expr::is_polynomial() const { return !r_ || r_->den.is_one(); }

Rat Expr::constant_value() const {
  if (!r_) return Rat(0);
  Rat q(num().constant_value(), den().constant_value());
  q.canonicalize();
  return q;
}

std::size_t Expr::size() const { return r_ ? r_->num.size() + r_->den.size() : 0; }

Expr Expr::operator-() const {
  if (!r_) return *this;
  return make_raw(-r_->num, r_->den);
}

Expr operator+(const Expr& a, const Expr& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  const Poly& da = a.den();
  const Poly& db = b.den();
  if (da.is_one() && db.is_one()) return Expr(a.num() + b.num());
  if (da == db) return Expr::fraction(a.num() + b.num(), da);
  if (da.is_one()) return Expr::make_raw(a.num() * db + b.num(), db);
  if (db.is_one()) return Expr::make_raw(a.num() + b.num() * da, da);
  Poly g = gcd(da, db);
  if (g.is_one()) return Expr::make_raw(a.num() * db + b.num() * da, da * db);
  Poly dap = exact_div(da, g), dbp = exact_div(db, g);
  Poly n = a.num() * dbp + b.num() * dap;
  if (n.is_zero()) return Expr();
  Poly d = dap * db;
  Poly g2 = gcd(n, g);
  if (!g2.is_one()) {
    n = exact_div(n, g2);
    d = exact_div(d, g2);
  }
  return Expr::make_raw(std::move(n), std::move(d));
}

Expr operator-(const Expr& a, const Expr& b) { return a + (-b); }

Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_zero() || b.is_zero()) return Expr();
  const Poly& na = a.num();
  const Poly& nb = b.num();
  const Poly& da = a.den();
  const Poly& db = b.den();
  if (da.is_one() && db.is_one()) return Expr(na * nb);
  Poly g1 = db.is_one() ? Poly(1L) : gcd(na, db);
  Poly g2 = da.is_one() ? Poly(1L) : gcd(nb, da);
  Poly n1 = g1.is_one() ? na : exact_div(na, g1);
  Poly d2 = g1.is_one() ? db : exact_div(db, g1);
  Poly n2 = g2.is_one() ? nb : exact_div(nb, g2);
  Poly d1 = g2.is_one() ? da : exact_div(da, g2);
  return Expr::make_raw(n1 * n2, d1 * d2);
}

Expr Expr::inverse() const {
  if (!r_) throw std::domain_error("division by zero expression");
  Poly n = r_->den, d = r_->num;
  if (d.lc() < 0) {
    n = -n;
    d = -d;
  }
  return make_raw(std::move(n), std::move(d));
}

Expr operator/(const Expr& a, const Expr& b) { return a * b.inverse(); }

Expr Expr::pow(int e) const {
  if (e == 0) return Expr(1L);
  if (!r_) {
    if (e < 0) throw std::domain_error("division by zero expression");
    return Expr();
  }
  if (e < 0) return inverse().pow(-e);
  return make_raw(r_->num.pow(static_cast<unsigned>(e)), r_->den.pow(static_cast<unsigned>(e)));
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.r_ == b.r_) return true;
  return a.num() == b.num() && a.den() == b.den();
}

bool is_zero(const Expr& e) { return e.is_zero(); }

Expr Expr::substitute(Var v, const Expr& value) const {
  if (!r_) return *this;
  std::uint32_t dn = r_->num.degree(v), dd = r_->den.degree(v);
  if (dn == 0 && dd == 0) return *this;
  std::uint32_t big = std::max(dn, dd);
  const Poly& p = value.num();
  const Poly& q = value.den();
  std::vector<Poly> pp{Poly(1L)}, qp{Poly(1L)};
  for (std::uint32_t k = 1; k <= big; ++k) {
    pp.push_back(pp.back() * p);
    qp.push_back(qp.back() * q);
  }
  auto sub = [&](const Poly& f) {
    auto c = f.coefficients_in(v);
    Poly acc;
    for (std::size_t k = 0; k < c.size(); ++k)
      if (!c[k].is_zero()) acc += c[k] * pp[k] * qp[big - k];
    return acc;
  };
  return fraction(sub(r_->num), sub(r_->den));
}

std::vector<Var> Expr::variables() const {
  auto a = num().variables();
  auto b = den().variables();
  std::vector<Var> r;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(r));
  return r;
}

// ------------------------------------------------------------------- Chart

Chart::Chart(std::vector<std::string> coordinates, std::vector<FunctionSymbol> functions,
             std::vector<std::string> parameters)
    : coords_(std::move(coordinates)), funcs_(std::move(functions)), params_(std::move(parameters)) {
  if (coords_.size() < 2) throw std::invalid_argument("chart dimension must be at least 2");
  std::vector<std::string> all = coords_;
  for (const auto& f : funcs_) {
    if (f.arg >= coords_.size()) throw std::invalid_argument("function argument is not a chart coordinate");
    all.push_back(f.name);
  }
  all.insert(all.end(), params_.begin(), params_.end());
  std::vector<std::string> sorted = all;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw std::invalid_argument("chart symbol names must be distinct");
  std::sort(funcs_.begin(), funcs_.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
}

Expr Chart::f(std::size_t fn, std::uint32_t order) const { return Expr(Poly::var(function(fn, order))); }

Expr Chart::f(const std::string& name, std::uint32_t order) const {
  auto i = function_index(name);
  if (!i) throw std::invalid_argument("unknown function symbol " + name);
  Expr e = f(*i);
  for (std::uint32_t k = 0; k < order; ++k) e = differentiate(e, funcs_[*i].arg);
  return e;
}

Expr Chart::param(const std::string& name) const {
  auto i = parameter_index(name);
  if (!i) throw std::invalid_argument("unknown parameter " + name);
  return Expr(Poly::var(parameter(*i)));
}

std::optional<std::size_t> Chart::coordinate_index(const std::string& name) const {
  for (std::size_t i = 0; i < coords_.size(); ++i)
    if (coords_[i] == name) return i;
  return std::nullopt;
}

std::optional<std::size_t> Chart::function_index(const std::string& name) const {
  for (std::size_t i = 0; i < funcs_.size(); ++i)
    if (funcs_[i].name == name) return i;
  return std::nullopt;
}

std::optional<std::size_t> Chart::parameter_index(const std::string& name) const {
  for (std::size_t i = 0; i < params_.size(); ++i)
    if (params_[i] == name) return i;
  return std::nullopt;
}

void Chart::set_exp_rate(std::size_t fn, const Expr& rate) {
  const std::size_t arg = funcs_.at(fn).arg;
  for (Var v : rate.variables())
    if (v.kind() != VarKind::Parameter && !(v.kind() == VarKind::Coordinate && v.index() == arg))
      throw std::invalid_argument("logarithmic rate may depend on parameters and the argument only");
  funcs_.at(fn).exp_rate = rate;
}

std::string Chart::name(Var v) const {
  switch (v.kind()) {
    case VarKind::Coordinate:
      return coords_.at(v.index());
    case VarKind::Function: {
      std::string s = funcs_.at(v.index()).name;
      std::uint32_t k = v.order();
      if (k <= 3) return s + std::string(k, '\'');
      return s + "^(" + std::to_string(k) + ")";
    }
    case VarKind::Parameter:
      return params_.at(v.index());
    default:
      return "_t" + std::to_string(v.index()) + (v.order() ? "_" + std::to_string(v.order()) : "");
  }
}

namespace {

// d/dx_coord of a polynomial, split into a polynomial part and a rational
// remainder from exponential-type symbols with non-polynomial rates.
Expr diff_poly(const Chart& chart, const Poly& p, std::size_t coord) {
  Poly poly_part;
  Expr rational_part;
  for (Var v : p.variables()) {
    switch (v.kind()) {
      case VarKind::Coordinate:
        if (v.index() == coord) poly_part += p.derivative(v);
        break;
      case VarKind::Function: {
        const auto& fs = chart.functions().at(v.index());
        if (fs.arg != coord) break;
        Poly dp = p.derivative(v);
        if (fs.exp_rate) {
          Poly fv = Poly::var(v);
          if (fs.exp_rate->is_polynomial())
            poly_part += dp * fv * fs.exp_rate->num();
          else
            rational_part += Expr(dp * fv) * *fs.exp_rate;
        } else {
          poly_part += dp * Poly::var(v.with_order(v.order() + 1));
        }
        break;
      }
      default:
        break;
    }
  }
  return Expr(poly_part) + rational_part;
}

}  // namespace

Expr Chart::differentiate(const Expr& e, std::size_t coord) const {
  if (coord >= coords_.size()) throw std::out_of_range("coordinate index out of range");
  if (e.is_zero()) return e;
  Expr dn = diff_poly(*this, e.num(), coord);
  if (e.den().is_one()) return dn;
  Expr dd = diff_poly(*this, e.den(), coord);
  if (dd.is_zero()) return dn * Expr::fraction(Poly(1L), e.den());
  if (dn.is_polynomial() && dd.is_polynomial()) {
    Poly n = dn.num() * e.den() - e.num() * dd.num();
    return Expr::fraction(n, e.den() * e.den());
  }
  Expr den(e.den());
  return (dn * den - Expr(e.num()) * dd) / (den * den);
}

// -------------------------------------------------------------- Printing

std::string to_string(const Expr& e, const std::function<std::string(Var)>& name) {
  if (e.is_polynomial()) return e.num().to_string(name);
  std::string n = e.num().to_string(name);
  std::string d = e.den().to_string(name);
  bool nsimple = e.num().size() == 1 && e.num().lc() > 0;
  bool dsimple = e.den().size() == 1 && e.den().lm().factors().size() <= 1 &&
                 (e.den().lm().is_one() || e.den().lc() == 1);
  return (nsimple ? n : "(" + n + ")") + "/" + (dsimple ? d : "(" + d + ")");
}

std::string to_string(const Expr& e, const Chart& chart) {
  return to_string(e, [&](Var v) { return chart.name(v); });
}

// ------------------------------------------------------------- Evaluation

double evaluate(const Expr& e, const Chart& chart, std::span<const double> point, const NumericEnv& env) {
  if (point.size() != chart.dimension()) throw EvaluationError("point dimension mismatch");
  std::map<std::pair<std::size_t, int>, std::vector<double>> fcache;
  auto value = [&](Var v) -> Rat {
    switch (v.kind()) {
      case VarKind::Coordinate:
        return Rat(point[v.index()]);
      case VarKind::Parameter:
        if (v.index() >= env.parameters.size() || std::isnan(env.parameters[v.index()]))
          throw EvaluationError("missing numeric value for parameter " + chart.name(v));
        return Rat(env.parameters[v.index()]);
      case VarKind::Function: {
        std::size_t fi = v.index();
        if (fi >= env.functions.size() || !env.functions[fi])
          throw EvaluationError("missing numeric implementation for " + chart.functions().at(fi).name);
        int k = static_cast<int>(v.order());
        std::vector<double> d(static_cast<std::size_t>(k) + 1);
        env.functions[fi](point[chart.functions()[fi].arg], k, d.data());
        if (!std::isfinite(d[k])) throw EvaluationError("non-finite value of " + chart.name(v));
        return Rat(d[k]);
      }
      default:
        throw EvaluationError("cannot evaluate auxiliary symbol");
    }
  };
  Rat n = e.num().evaluate(value);
  if (e.den().is_one()) return n.get_d();
  Rat d = e.den().evaluate(value);
  if (d == 0) throw EvaluationError("pole at evaluation point");
  Rat q = n / d;
  return q.get_d();
}

}  // namespace projmetric
