#include "projmetric/metric.hpp"

#include "projmetric/linalg.hpp"

namespace projmetric {

Tensor<Expr> invert_symmetric(const Tensor<Expr>& g, const std::string& variance) {
  const std::size_t n = g.dim();
  ExprMatrix m(n, std::vector<Expr>(n));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) m[a][b] = g(a, b);
  ExprMatrix inv;
  try {
    inv = inverse(m);
  } catch (const std::domain_error&) {
    throw SingularMetric("metric determinant vanishes identically");
  }
  Tensor<Expr> out(n, variance);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) out(a, b) = inv[a][b];
  return out;
}

Metric::Metric(Chart chart, Tensor<Expr> g, std::optional<std::pair<int, int>> signature)
    : chart_(std::move(chart)), g_(std::move(g)), sig_(signature) {
  const std::size_t n = chart_.dimension();
  if (g_.dim() != n || g_.rank() != 2) throw std::invalid_argument("metric must be a rank-2 tensor on the chart");
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      if (g_(a, b) != g_(b, a)) throw std::invalid_argument("metric is not symmetric");
  ExprMatrix m(n, std::vector<Expr>(n));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) m[a][b] = g_(a, b);
  det_ = determinant(m);
  if (det_.is_zero()) throw SingularMetric("metric determinant vanishes identically");
  ginv_ = invert_symmetric(g_, "uu");
}

Connection levi_civita(const Metric& g) {
  const std::size_t n = g.dimension();
  const Chart& ch = g.chart();
  Tensor<Expr> dg(n, "ddd");  // dg(a,b,c) = ∂_c g_ab
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a; b < n; ++b)
      for (std::size_t c = 0; c < n; ++c) {
        Expr v = ch.differentiate(g.lower()(a, b), c);
        dg(a, b, c) = v;
        dg(b, a, c) = v;
      }
  Tensor<Expr> low(n, "ddd");  // Γ_dbc
  for (std::size_t d = 0; d < n; ++d)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t c = b; c < n; ++c) low(d, b, c) = Expr(Rat(1, 2)) * (dg(d, c, b) + dg(d, b, c) - dg(b, c, d));
  Tensor<Expr> G(n, "udd");
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t c = b; c < n; ++c) {
        Expr v;
        for (std::size_t d = 0; d < n; ++d)
          if (!g.upper()(a, d).is_zero() && !low(d, b, c).is_zero()) v += g.upper()(a, d) * low(d, b, c);
        G(a, b, c) = v;
        G(a, c, b) = v;
      }
  return Connection(ch, std::move(G));
}

IdentityResidual metric_compatibility(const Metric& g, const Connection& conn) {
  return residual_of("metric_compatibility", covariant_derivative(g.lower(), conn));
}

MetricDecomposition metric_decomposition(const Metric& g) {
  const std::size_t n = g.dimension();
  if (n < 3) throw std::invalid_argument("metric decomposition needs n >= 3");
  const long nl = static_cast<long>(n);
  MetricDecomposition out;
  out.riemann = curvature(levi_civita(g));
  out.ricci = Tensor<Expr>(n, "dd");
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t c = 0; c < n; ++c) out.ricci(a, b) += out.riemann(c, a, c, b);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) out.scalar += g.upper()(a, b) * out.ricci(a, b);
  out.schouten = Tensor<Expr>(n, "dd");
  out.einstein = Tensor<Expr>(n, "dd");
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      out.schouten(a, b) = (out.ricci(a, b) - out.scalar * g.lower()(a, b) * Expr(Rat(1, 2 * (nl - 1)))) *
                           Expr(Rat(1, nl - 2));
      out.einstein(a, b) = out.ricci(a, b) - Expr(Rat(1, 2)) * out.scalar * g.lower()(a, b);
    }
  Tensor<Expr> Pu(n, "ud");  // g^ae P_ec
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t c = 0; c < n; ++c)
      for (std::size_t e = 0; e < n; ++e) Pu(a, c) += g.upper()(a, e) * out.schouten(e, c);
  out.weyl = out.riemann;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t c = 0; c < n; ++c)
        for (std::size_t d = 0; d < n; ++d) {
          if (c == d) continue;
          Expr s = g.lower()(b, d) * Pu(a, c) - g.lower()(b, c) * Pu(a, d);
          if (a == c) s += out.schouten(d, b);
          if (a == d) s -= out.schouten(c, b);
          out.weyl(a, b, c, d) -= s;
        }
  return out;
}

Tensor<Expr> weyl_symmetry_residual(const Tensor<Expr>& W, const Tensor<Expr>& g_upper) {
  const std::size_t n = W.dim();
  Tensor<Expr> glow = invert_symmetric(g_upper, "dd");
  // K^e_d = g^bc W^e_bcd.
  Tensor<Expr> K(n, "ud");
  for (std::size_t e = 0; e < n; ++e)
    for (std::size_t d = 0; d < n; ++d)
      for (std::size_t b = 0; b < n; ++b)
        for (std::size_t c = 0; c < n; ++c)
          if (!g_upper(b, c).is_zero() && !W(e, b, c, d).is_zero()) K(e, d) += g_upper(b, c) * W(e, b, c, d);
  Tensor<Expr> L(n, "dd");  // g_ae K^e_d
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t d = 0; d < n; ++d)
      for (std::size_t e = 0; e < n; ++e)
        if (!glow(a, e).is_zero() && !K(e, d).is_zero()) L(a, d) += glow(a, e) * K(e, d);
  Tensor<Expr> out(n, "dd");
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t d = 0; d < n; ++d) out(a, d) = L(a, d) - L(d, a);
  return out;
}

std::vector<IdentityResidual> projective_vs_metric_report(const Metric& g) {
  const std::size_t n = g.dimension();
  const long nl = static_cast<long>(n);
  auto md = metric_decomposition(g);
  auto pkg = decompose(levi_civita(g));
  const Expr k1(Rat(1, nl - 1)), k12(Rat(1, (nl - 1) * (nl - 2))), k2(Rat(1, nl - 2));
  Tensor<Expr> r1(n, "dd"), r2(n, "dd");
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      r1(a, b) = pkg.schouten(a, b) - k1 * md.ricci(a, b);
      r2(a, b) = pkg.schouten(a, b) - md.schouten(a, b) + k12 * md.einstein(a, b);
    }
  Tensor<Expr> Ru(n, "ud");  // g^ae R_ec
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t c = 0; c < n; ++c)
      for (std::size_t e = 0; e < n; ++e) Ru(a, c) += g.upper()(a, e) * md.ricci(e, c);
  Tensor<Expr> r3 = pkg.weyl;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t c = 0; c < n; ++c)
        for (std::size_t d = 0; d < n; ++d) {
          Expr rhs = md.weyl(a, b, c, d) + k2 * (g.lower()(b, d) * Ru(a, c) - g.lower()(b, c) * Ru(a, d));
          Expr t = a == c ? md.ricci(d, b) : Expr();
          if (a == d) t -= md.ricci(c, b);
          Expr s = a == d ? g.lower()(b, c) : Expr();
          if (a == c) s -= g.lower()(b, d);
          rhs += k12 * t + k12 * md.scalar * s;
          r3(a, b, c, d) -= rhs;
        }
  Tensor<Expr> r5(n, "dd");
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t d = 0; d < n; ++d) {
      Expr v;
      for (std::size_t e = 0; e < n; ++e)
        for (std::size_t b = 0; b < n; ++b)
          for (std::size_t c = 0; c < n; ++c)
            if (!g.upper()(b, c).is_zero() && !pkg.weyl(e, b, c, d).is_zero())
              v += g.lower()(a, e) * g.upper()(b, c) * pkg.weyl(e, b, c, d);
      r5(a, d) = Expr(nl - 1) * v + Expr(nl) * md.ricci(a, d) - md.scalar * g.lower()(a, d);
    }
  return {residual_of("schouten_ricci", r1), residual_of("schouten_einstein", r2), residual_of("weyl_relation", r3),
          residual_of("weyl_symmetry", weyl_symmetry_residual(pkg.weyl, g.upper())),
          residual_of("weyl_trace_identity", r5)};
}

Tensor<Expr> weyl_equality_residual(const Metric& g) {
  const std::size_t n = g.dimension();
  const Expr nm1(static_cast<long>(n) - 1);
  auto md = metric_decomposition(g);
  const auto& G = g.lower();
  const auto& R = md.ricci;
  Tensor<Expr> out(n, "dddd");
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t c = 0; c < n; ++c)
        for (std::size_t d = 0; d < n; ++d)
          out(a, b, c, d) = G(a, c) * R(d, b) - G(a, d) * R(c, b) + (G(a, d) * G(c, b) - G(a, c) * G(d, b)) * md.scalar +
                            nm1 * (G(b, d) * R(a, c) - G(b, c) * R(a, d));
  return out;
}

Metric desitter_metric(std::size_t p, std::size_t q, const std::vector<Rat>& X) {
  const std::size_t n = p + q;
  if (X.size() != n) throw std::invalid_argument("X must have n components");
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) names.push_back("x" + std::to_string(i + 1));
  Chart ch(names);
  Expr s;
  for (std::size_t a = 0; a < n; ++a) s += Expr(a < p ? X[a] : Rat(-X[a])) * ch.x(a);
  if (s.is_zero()) throw std::invalid_argument("eta(X, x) vanishes identically: null domain");
  Expr w = s.pow(-2);
  Tensor<Expr> g(n, "dd");
  for (std::size_t a = 0; a < n; ++a) g(a, a) = a < p ? w : -w;
  return Metric(ch, std::move(g), std::make_pair(static_cast<int>(p), static_cast<int>(q)));
}

}  // namespace projmetric
