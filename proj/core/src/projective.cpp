#include "projmetric/projective.hpp"

#include <cmath>

#include <boost/numeric/odeint.hpp>

#include "projmetric/jet.hpp"

namespace projmetric {

Connection gauge_transform(const Connection& conn, const GaugeChange& g) {
  const std::size_t n = conn.dimension();
  if (g.A.dim() != n || g.A.degree() != 1) throw std::invalid_argument("gauge change must be a 1-form on the chart");
  std::vector<Expr> A(n);
  for (std::size_t a = 0; a < n; ++a) A[a] = g.A(a);
  return Connection(conn.chart(), gauge_gamma(ExprField(conn.chart()), conn.gamma(), A));
}

bool is_special(const Connection& conn) {
  return exterior_derivative(ScalarForm::one_form(conn.trace()), conn.chart()).is_zero();
}

SpecialResult make_special(const Connection& conn, const SpecialOptions& opt) {
  const std::size_t n = conn.dimension();
  const Chart& ch = conn.chart();
  SpecialResult out{conn, GaugeChange::zero(n), SpecialResult::Route::AlreadySpecial};
  if (is_special(conn)) return out;

  auto pkg = decompose(conn);
  Tensor<Expr> twoP(n, "dd");
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) twoP(a, b) = Expr(2) * pkg.schouten(a, b);
  auto beta2 = ScalarForm::two_form(twoP);
  if (auto lam = find_primitive(beta2, ch)) {
    out.gauge = GaugeChange{*lam};
    out.route = SpecialResult::Route::Primitive;
  } else {
    if (!opt.allow_trace_fallback) throw PrimitiveNotFound("no rational primitive for the antisymmetric Schouten part");
    std::vector<Expr> A = conn.trace();
    const Expr k(Rat(-1, static_cast<long>(n) + 1));
    for (auto& e : A) e = k * e;
    out.gauge = GaugeChange{ScalarForm::one_form(A)};
    out.route = SpecialResult::Route::TraceFree;
  }
  out.connection = gauge_transform(conn, out.gauge);
  if (!is_special(out.connection)) throw std::logic_error("make_special produced a non-special connection");
  return out;
}

bool is_projectively_flat(const CurvaturePackage& pkg) {
  const std::size_t n = pkg.connection.dimension();
  if (n < 2) return true;
  const Tensor<Expr>& t = n == 2 ? pkg.cotton : pkg.weyl;
  for (std::size_t k = 0; k < t.size(); ++k)
    if (!t.flat(k).is_zero()) return false;
  return true;
}

bool is_projectively_flat(const Connection& conn) { return is_projectively_flat(decompose(conn)); }

std::optional<GaugeChange> same_projective_class(const Connection& c1, const Connection& c2) {
  const std::size_t n = c1.dimension();
  if (c2.dimension() != n) throw std::invalid_argument("connections live on different charts");
  auto t1 = c1.trace(), t2 = c2.trace();
  std::vector<Expr> A(n);
  const Expr k(Rat(1, static_cast<long>(n) + 1));
  for (std::size_t b = 0; b < n; ++b) A[b] = k * (t2[b] - t1[b]);
  GaugeChange g{ScalarForm::one_form(A)};
  auto trial = gauge_transform(c1, g);
  for (std::size_t i = 0; i < trial.gamma().size(); ++i)
    if (trial.gamma().flat(i) != c2.gamma().flat(i)) return std::nullopt;
  return g;
}

namespace {

class GammaEvaluator {
 public:
  GammaEvaluator(const Connection& conn, const NumericEnv& env) : chart_(conn.chart()), env_(env), n_(conn.dimension()) {
    for (std::size_t a = 0; a < n_; ++a)
      for (std::size_t b = 0; b < n_; ++b)
        for (std::size_t c = b; c < n_; ++c)
          if (!conn(a, b, c).is_zero()) entries_.push_back({a, b, c, CompiledExpr(conn(a, b, c), chart_)});
  }

  // Γ(u,u)^a at x.
  void contract(const double* x, const double* u, double* out) const {
    std::fill(out, out + n_, 0.0);
    PointEvaluator ev(chart_, env_, std::span<const double>(x, n_), 0);
    for (const auto& e : entries_) {
      double g = ev.value(e.expr);
      out[e.a] += (e.b == e.c ? 1.0 : 2.0) * g * u[e.b] * u[e.c];
    }
  }

 private:
  struct Entry {
    std::size_t a, b, c;
    CompiledExpr expr;
  };
  const Chart& chart_;
  const NumericEnv& env_;
  std::size_t n_;
  std::vector<Entry> entries_;
};

}  // namespace

std::vector<GeodesicSample> integrate_geodesic(const Connection& conn, const NumericEnv& env,
                                               std::span<const double> x0, std::span<const double> v0,
                                               double arclen, const GeodesicOptions& opt) {
  namespace ode = boost::numeric::odeint;
  using State = std::vector<double>;
  const std::size_t n = conn.dimension();
  if (x0.size() != n || v0.size() != n) throw std::invalid_argument("geodesic initial data has wrong dimension");
  double norm = 0;
  for (double v : v0) norm += v * v;
  norm = std::sqrt(norm);
  if (!(norm > 0)) throw std::invalid_argument("geodesic direction must be nonzero");

  GammaEvaluator G(conn, env);
  State s(2 * n);
  for (std::size_t a = 0; a < n; ++a) {
    s[a] = x0[a];
    s[n + a] = v0[a] / norm;
  }
  std::vector<double> guu(n);
  auto rhs = [&](const State& y, State& dy, double) {
    try {
      G.contract(y.data(), y.data() + n, guu.data());
    } catch (const EvaluationError& e) {
      throw GeodesicSingularity(e.what());
    }
    double uu = 0, ug = 0;
    for (std::size_t a = 0; a < n; ++a) {
      uu += y[n + a] * y[n + a];
      ug += y[n + a] * guu[a];
    }
    for (std::size_t a = 0; a < n; ++a) {
      dy[a] = y[n + a];
      // The last term keeps |u| = 1 stable against drift.
      dy[n + a] = -guu[a] + ug * y[n + a] / uu + 0.5 * (1 - uu) * y[n + a];
    }
    for (double v : dy)
      if (!std::isfinite(v)) throw GeodesicSingularity("non-finite geodesic equation");
  };

  std::vector<double> times(std::max<std::size_t>(opt.samples, 2));
  for (std::size_t i = 0; i < times.size(); ++i) times[i] = arclen * static_cast<double>(i) / (times.size() - 1);
  std::vector<GeodesicSample> out;
  auto obs = [&](const State& y, double t) { out.push_back({t, State(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(n))}); };
  ode::integrate_times(ode::make_dense_output(opt.tolerance, opt.tolerance, ode::runge_kutta_dopri5<State>()), rhs, s,
                       times.begin(), times.end(), arclen / 256, obs);
  return out;
}

double trace_deviation(const std::vector<GeodesicSample>& a, const std::vector<GeodesicSample>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("traces sampled differently");
  double worst = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a[i].s - b[i].s) > 1e-12) throw std::invalid_argument("traces sampled at different arclengths");
    double d = 0;
    for (std::size_t k = 0; k < a[i].x.size(); ++k) d += (a[i].x[k] - b[i].x[k]) * (a[i].x[k] - b[i].x[k]);
    worst = std::max(worst, std::sqrt(d));
  }
  return worst;
}

}  // namespace projmetric
