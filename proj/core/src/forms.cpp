#include "projmetric/forms.hpp"

#include "projmetric/jet.hpp"

#include <algorithm>
#include <functional>
#include <map>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace projmetric {

ScalarForm::ScalarForm(std::size_t n, std::size_t k) : c_(n, std::string(k, 'd')) {}

ScalarForm ScalarForm::function(std::size_t n, const Expr& f) {
  ScalarForm w(n, 0);
  w.c_() = f;
  return w;
}

ScalarForm ScalarForm::one_form(const std::vector<Expr>& c) {
  ScalarForm w(c.size(), 1);
  for (std::size_t a = 0; a < c.size(); ++a) w.c_(a) = c[a];
  return w;
}

ScalarForm ScalarForm::two_form(const Tensor<Expr>& t) {
  const std::size_t n = t.dim();
  ScalarForm w(n, 2);
  const Expr half(Rat(1, 2));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b) {
      Expr v = half * (t(a, b) - t(b, a));
      w.c_(a, b) = v;
      w.c_(b, a) = -v;
    }
  return w;
}

void ScalarForm::set(std::span<const std::size_t> idx, const Expr& v) {
  std::vector<std::size_t> p(idx.begin(), idx.end());
  std::vector<std::size_t> order(p.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  // Fill every permutation with its sign; repeated indices stay zero.
  std::sort(order.begin(), order.end());
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = i + 1; j < p.size(); ++j)
      if (p[i] == p[j]) return;
  do {
    std::vector<std::size_t> q(p.size());
    int sign = 1;
    for (std::size_t i = 0; i < p.size(); ++i) q[i] = p[order[i]];
    for (std::size_t i = 0; i < order.size(); ++i)
      for (std::size_t j = i + 1; j < order.size(); ++j)
        if (order[i] > order[j]) sign = -sign;
    c_.at(q) = sign > 0 ? v : -v;
  } while (std::next_permutation(order.begin(), order.end()));
}

bool ScalarForm::is_zero() const {
  for (std::size_t k = 0; k < c_.size(); ++k)
    if (!c_.flat(k).is_zero()) return false;
  return true;
}

ScalarForm operator+(const ScalarForm& a, const ScalarForm& b) {
  ScalarForm r = a;
  for (std::size_t k = 0; k < r.c_.size(); ++k) r.c_.flat(k) += b.c_.flat(k);
  return r;
}

ScalarForm operator-(const ScalarForm& a, const ScalarForm& b) {
  ScalarForm r = a;
  for (std::size_t k = 0; k < r.c_.size(); ++k) r.c_.flat(k) -= b.c_.flat(k);
  return r;
}

ScalarForm operator*(const Expr& s, const ScalarForm& a) {
  ScalarForm r = a;
  for (std::size_t k = 0; k < r.c_.size(); ++k) r.c_.flat(k) = s * r.c_.flat(k);
  return r;
}

bool operator==(const ScalarForm& a, const ScalarForm& b) {
  if (a.dim() != b.dim() || a.degree() != b.degree()) return false;
  for (std::size_t k = 0; k < a.c_.size(); ++k)
    if (a.c_.flat(k) != b.c_.flat(k)) return false;
  return true;
}

ScalarForm exterior_derivative(const ScalarForm& w, const Chart& chart) {
  const std::size_t n = w.dim();
  const std::size_t k = w.degree();
  ScalarForm r(n, k + 1);
  std::vector<std::size_t> idx(k + 1);
  // Enumerate increasing index tuples.
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t pos, std::size_t start) {
    if (pos == k + 1) {
      Expr v;
      std::vector<std::size_t> rest(k);
      for (std::size_t j = 0; j <= k; ++j) {
        std::size_t q = 0;
        for (std::size_t i = 0; i <= k; ++i)
          if (i != j) rest[q++] = idx[i];
        const Expr& c = w.components().at(rest);
        if (c.is_zero()) continue;
        Expr dc = chart.differentiate(c, idx[j]);
        if (j % 2)
          v -= dc;
        else
          v += dc;
      }
      if (!v.is_zero()) r.set(idx, v);
      return;
    }
    for (std::size_t i = start; i < n; ++i) {
      idx[pos] = i;
      rec(pos + 1, i + 1);
    }
  };
  rec(0, 0);
  return r;
}

bool depends_on(const Expr& e, std::size_t a, const Chart& chart) {
  for (Var v : e.variables()) {
    if (v.kind() == VarKind::Coordinate && v.index() == a) return true;
    if (v.kind() == VarKind::Function && chart.functions()[v.index()].arg == a) return true;
  }
  return false;
}

namespace {

bool var_depends(Var v, std::size_t a, const Chart& chart) {
  if (v.kind() == VarKind::Coordinate) return v.index() == a;
  if (v.kind() == VarKind::Function) return chart.functions()[v.index()].arg == a;
  return false;
}

// Antiderivative of a monomial in symbols depending on x^a.
std::optional<Expr> integrate_dependent(const std::vector<VarPow>& dep, std::size_t a, const Chart& chart) {
  if (dep.empty()) return chart.x(a);
  if (dep.size() == 1) {
    Var v{dep[0].var};
    std::uint32_t p = dep[0].exp;
    if (v.kind() == VarKind::Coordinate) return chart.x(a).pow(static_cast<int>(p + 1)) * Expr(Rat(1, static_cast<long>(p) + 1));
    const auto& fs = chart.functions()[v.index()];
    if (fs.exp_rate) {
      if (depends_on(*fs.exp_rate, a, chart) || fs.exp_rate->is_zero()) return std::nullopt;
      return Expr(Poly::var(v, p)) / (Expr(static_cast<long>(p)) * *fs.exp_rate);
    }
    if (p == 1 && v.order() >= 1) return Expr(Poly::var(v.with_order(v.order() - 1)));
    return std::nullopt;
  }
  if (dep.size() == 2) {
    Var v0{dep[0].var}, v1{dep[1].var};
    // Sorted keys: same function, consecutive orders, top order to the first power.
    if (v0.kind() == VarKind::Function && v1.kind() == VarKind::Function && v0.index() == v1.index() &&
        v1.order() == v0.order() + 1 && dep[1].exp == 1 && !chart.functions()[v0.index()].exp_rate) {
      std::uint32_t p = dep[0].exp;
      return Expr(Poly::var(v0, p + 1)) * Expr(Rat(1, static_cast<long>(p) + 1));
    }
  }
  return std::nullopt;
}

}  // namespace

std::optional<Expr> antiderivative(const Expr& e, std::size_t a, const Chart& chart) {
  if (e.is_zero()) return Expr();
  if (!depends_on(e, a, chart)) return e * chart.x(a);
  if (depends_on(Expr(e.den()), a, chart)) return std::nullopt;
  Expr acc;
  for (const auto& t : e.num().terms()) {
    std::vector<VarPow> dep;
    Monomial rest;
    for (const auto& f : t.mono.factors()) {
      if (var_depends(Var{f.var}, a, chart))
        dep.push_back(f);
      else
        rest = rest * Monomial::of(Var{f.var}, f.exp);
    }
    auto F = integrate_dependent(dep, a, chart);
    if (!F) return std::nullopt;
    acc += Expr(Poly::monomial(rest, t.coef)) * *F;
  }
  return acc / Expr(e.den());
}

std::optional<ScalarForm> find_primitive(const ScalarForm& omega, const Chart& chart) {
  const std::size_t n = omega.dim();
  const std::size_t k = omega.degree();
  if (k == 0 || k > 2) throw std::invalid_argument("find_primitive supports forms of degree 1 and 2");
  if (!exterior_derivative(omega, chart).is_zero()) throw NotClosed();
  if (omega.is_zero()) return ScalarForm(n, k - 1);
  if (k == 1) {
    Expr lam;
    for (std::size_t a = 0; a < n; ++a) {
      Expr r = omega(a) - chart.differentiate(lam, a);
      if (r.is_zero()) continue;
      auto F = antiderivative(r, a, chart);
      if (!F) return std::nullopt;
      lam += *F;
    }
    ScalarForm res = ScalarForm::function(n, lam);
    if (!(exterior_derivative(res, chart) == omega)) return std::nullopt;
    return res;
  }
  std::vector<Expr> lam(n);
  for (std::size_t s = 0; s + 1 < n; ++s) {
    ScalarForm cur = exterior_derivative(ScalarForm::one_form(lam), chart);
    for (std::size_t b = s + 1; b < n; ++b) {
      Expr r = omega(s, b) - cur(s, b);
      if (r.is_zero()) continue;
      auto F = antiderivative(r, s, chart);
      if (!F) return std::nullopt;
      lam[b] += *F;
    }
  }
  ScalarForm res = ScalarForm::one_form(lam);
  if (!(exterior_derivative(res, chart) == omega)) return std::nullopt;
  return res;
}

namespace {

// Refines a list of polynomials into pairwise coprime, non-constant factors.
std::vector<Poly> coprime_base(const std::vector<Poly>& input) {
  std::vector<Poly> base;
  auto add = [&](Poly p) {
    std::vector<Poly> work{std::move(p)};
    while (!work.empty()) {
      Poly q = std::move(work.back());
      work.pop_back();
      q = q.primitive_part();
      if (q.is_constant()) continue;
      bool merged = false;
      for (std::size_t i = 0; i < base.size(); ++i) {
        Poly g = gcd(base[i], q);
        if (g.is_constant()) continue;
        Poly bi = exact_div(base[i], g);
        Poly qi = exact_div(q, g);
        base.erase(base.begin() + static_cast<std::ptrdiff_t>(i));
        work.push_back(g);
        work.push_back(bi);
        work.push_back(qi);
        merged = true;
        break;
      }
      if (merged) continue;
      if (q.lc() < 0) q = -q;
      base.push_back(std::move(q));
    }
  };
  for (const auto& p : input) {
    // Split off monomial content variable by variable.
    Monomial mc = p.monomial_content();
    for (const auto& f : mc.factors()) add(Poly::var(Var{f.var}));
    add(exact_div(p, Poly::monomial(mc, Int(1))));
  }
  // Deduplicate.
  std::vector<Poly> out;
  for (auto& b : base)
    if (std::find(out.begin(), out.end(), b) == out.end()) out.push_back(b);
  return out;
}

// Solves a dense rational system; returns one solution or absent.
std::optional<std::vector<Rat>> solve_rational(std::vector<std::vector<Rat>> M, std::vector<Rat> rhs, std::size_t cols) {
  const std::size_t rows = M.size();
  std::vector<std::size_t> pivcol;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t p = r;
    while (p < rows && M[p][c] == 0) ++p;
    if (p == rows) continue;
    std::swap(M[p], M[r]);
    std::swap(rhs[p], rhs[r]);
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || M[i][c] == 0) continue;
      Rat f = M[i][c] / M[r][c];
      for (std::size_t j = c; j < cols; ++j) M[i][j] -= f * M[r][j];
      rhs[i] -= f * rhs[r];
    }
    pivcol.push_back(c);
    ++r;
  }
  for (std::size_t i = r; i < rows; ++i)
    if (rhs[i] != 0) return std::nullopt;
  std::vector<Rat> x(cols, Rat(0));
  for (std::size_t i = 0; i < r; ++i) x[pivcol[i]] = rhs[i] / M[i][pivcol[i]];
  return x;
}

}  // namespace

std::optional<LogGradient> recognize_log_gradient(const ScalarForm& A, const Chart& chart) {
  const std::size_t n = A.dim();
  if (A.degree() != 1) throw std::invalid_argument("recognize_log_gradient expects a 1-form");
  LogGradient out;
  if (A.is_zero()) {
    out.conformal_factor = Expr(1);
    return out;
  }
  std::vector<Poly> dens;
  for (std::size_t a = 0; a < n; ++a)
    if (!A(a).is_zero()) dens.push_back(A(a).den());
  std::vector<Poly> base = coprime_base(dens);
  if (base.empty()) return std::nullopt;
  Poly D(1L);
  for (const auto& u : base) D = D * u;
  // 2 A_a D = Σ e_i ∂_a u_i D/u_i, coefficientwise.
  std::vector<std::vector<Rat>> M;
  std::vector<Rat> rhs;
  for (std::size_t a = 0; a < n; ++a) {
    Expr lhs = Expr(2) * A(a) * Expr(D);
    if (!lhs.den().is_constant()) return std::nullopt;
    const Rat lden(lhs.den().constant_value());
    std::vector<Poly> cols;
    for (const auto& u : base) cols.push_back(exact_div(D, u) * chart.differentiate(Expr(u), a).num());
    std::map<std::string, std::size_t> row_of;
    std::vector<Monomial> monos;
    auto row_for = [&](const Monomial& m) {
      std::string key;
      for (const auto& f : m.factors()) key += std::to_string(f.var) + "^" + std::to_string(f.exp) + ",";
      auto it = row_of.find(key);
      if (it != row_of.end()) return it->second;
      M.push_back(std::vector<Rat>(base.size(), Rat(0)));
      rhs.push_back(Rat(0));
      row_of[key] = M.size() - 1;
      return M.size() - 1;
    };
    for (const auto& t : lhs.num().terms()) rhs[row_for(t.mono)] += Rat(t.coef) / lden;
    for (std::size_t i = 0; i < cols.size(); ++i)
      for (const auto& t : cols[i].terms()) M[row_for(t.mono)][i] += Rat(t.coef);
  }
  auto e = solve_rational(M, rhs, base.size());
  if (!e) return std::nullopt;
  bool integral = true;
  Expr w(1);
  for (std::size_t i = 0; i < base.size(); ++i) {
    Rat ei = (*e)[i];
    ei.canonicalize();
    if (ei == 0) continue;
    out.factors.push_back({Expr(base[i]), Rat(-ei)});
    if (ei.get_den() != 1) {
      integral = false;
      continue;
    }
    w = w * Expr(base[i]).pow(static_cast<int>(ei.get_num().get_si()));
  }
  // Exact verification: d log w = 2A.
  if (integral) {
    for (std::size_t a = 0; a < n; ++a)
      if (chart.differentiate(w, a) != Expr(2) * A(a) * w) return std::nullopt;
    out.conformal_factor = w;
  }
  return out;
}

double line_integral(const ScalarForm& A, const Chart& chart, const NumericEnv& env, std::span<const double> from,
                     std::span<const double> to) {
  const std::size_t n = A.dim();
  std::vector<CompiledExpr> comp;
  for (std::size_t a = 0; a < n; ++a) comp.emplace_back(A(a), chart);
  std::vector<double> p(from.begin(), from.end());
  double total = 0;
  for (std::size_t a = 0; a < n; ++a) {
    const double x0 = p[a], x1 = to[a];
    if (x0 == x1 || comp[a].is_zero()) {
      p[a] = x1;
      continue;
    }
    auto f = [&](double t) {
      std::vector<double> q = p;
      q[a] = t;
      PointEvaluator ev(chart, env, q, 0);
      return ev.value(comp[a]);
    };
    total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, x0, x1, 15, 1e-13);
    p[a] = x1;
  }
  return total;
}

}  // namespace projmetric
