#include "projmetric/connection.hpp"

#include <stdexcept>

namespace projmetric {

Connection::Connection(Chart chart, Tensor<Expr> gamma) : chart_(std::move(chart)), gamma_(std::move(gamma)) {
  const std::size_t n = chart_.dimension();
  if (gamma_.dim() != n || gamma_.variance() != "udd")
    throw std::invalid_argument("connection coefficients must be a (1,2) tensor over the chart");
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t c = b + 1; c < n; ++c)
        if (gamma_(a, b, c) != gamma_(a, c, b))
          throw std::invalid_argument("connection has torsion: Gamma^" + std::to_string(a + 1) + "_" +
                                      std::to_string(b + 1) + std::to_string(c + 1) + " is not symmetric");
}

Connection Connection::flat(const Chart& chart) {
  return Connection(chart, Tensor<Expr>(chart.dimension(), "udd"));
}

Connection make_connection(const Chart& chart, const std::vector<GammaEntry>& entries) {
  const std::size_t n = chart.dimension();
  Tensor<Expr> G(n, "udd");
  Tensor<int> seen(n, "udd", 0);
  for (const auto& e : entries) {
    if (e.upper >= n || e.lower1 >= n || e.lower2 >= n) throw std::invalid_argument("connection index out of range");
    for (auto [b, c] : {std::pair{e.lower1, e.lower2}, std::pair{e.lower2, e.lower1}}) {
      if (seen(e.upper, b, c) && G(e.upper, b, c) != e.value)
        throw std::invalid_argument("conflicting connection entries");
      G(e.upper, b, c) = e.value;
      seen(e.upper, b, c) = 1;
    }
  }
  return Connection(chart, std::move(G));
}

std::vector<Expr> Connection::trace() const {
  const std::size_t n = dimension();
  std::vector<Expr> t(n);
  for (std::size_t b = 0; b < n; ++b)
    for (std::size_t c = 0; c < n; ++c) t[b] += gamma_(c, b, c);
  return t;
}

Tensor<Expr> curvature(const Connection& conn) { return riemann_tensor(ExprField(conn.chart()), conn.gamma()); }

Tensor<Expr> covariant_derivative(const Tensor<Expr>& t, const Connection& conn) {
  return covariant_derivative_of(ExprField(conn.chart()), conn.gamma(), t);
}

CurvaturePackage decompose(const Connection& conn, bool cross_check) {
  ExprField f(conn.chart());
  auto s = curvature_set(f, conn.gamma());
  CurvaturePackage pkg{conn, std::move(s.riemann), std::move(s.ricci), std::move(s.weyl), std::move(s.schouten),
                       std::move(s.cotton)};
  if (cross_check && conn.dimension() > 2) {
    for (const auto& r : check_bianchi(pkg))
      if (r.name == "divergence" && !r.holds())
        throw std::logic_error("Cotton tensor disagrees with Weyl divergence");
  }
  return pkg;
}

Tensor<Expr> symmetrize(const Tensor<Expr>& t, const Chart& chart, const std::vector<std::size_t>& slots) {
  return symmetrize(ExprField(chart), t, slots, false);
}

Tensor<Expr> antisymmetrize(const Tensor<Expr>& t, const Chart& chart, const std::vector<std::size_t>& slots) {
  return symmetrize(ExprField(chart), t, slots, true);
}

IdentityResidual residual_of(const std::string& name, const Tensor<Expr>& t) {
  IdentityResidual r;
  r.name = name;
  r.components = t.size();
  for (std::size_t k = 0; k < t.size(); ++k)
    if (!t.flat(k).is_zero()) {
      if (r.nonzero == 0) r.witness = t.flat(k);
      ++r.nonzero;
    }
  return r;
}

std::vector<IdentityResidual> check_bianchi(const CurvaturePackage& pkg) {
  const Connection& conn = pkg.connection;
  const std::size_t n = conn.dimension();
  const Expr nm2(static_cast<long>(n) - 2);
  const auto& W = pkg.weyl;
  const auto& P = pkg.schouten;
  const auto& Y = pkg.cotton;
  std::vector<IdentityResidual> out;

  Tensor<Expr> cyc(n, "uddd");
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t c = 0; c < n; ++c)
        for (std::size_t d = 0; d < n; ++d) cyc(a, b, c, d) = W(a, b, c, d) + W(a, c, d, b) + W(a, d, b, c);
  out.push_back(residual_of("weyl_cyclic", cyc));

  Tensor<Expr> DW = covariant_derivative(W, conn);
  Tensor<Expr> div(n, "ddd");
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t c = 0; c < n; ++c) {
        Expr v;
        for (std::size_t d = 0; d < n; ++d) v += DW(d, a, b, c, d);
        div(a, b, c) = v - nm2 * Y(b, c, a);
      }
  out.push_back(residual_of("divergence", div));

  Tensor<Expr> ycyc(n, "ddd");
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t c = 0; c < n; ++c) ycyc(a, b, c) = Y(a, b, c) + Y(b, c, a) + Y(c, a, b);
  out.push_back(residual_of("cotton_cyclic", ycyc));

  Tensor<Expr> DP = covariant_derivative(P, conn);
  out.push_back(residual_of("schouten_closed", antisymmetrize(DP, conn.chart(), {0, 1, 2})));

  Tensor<Expr> DY = covariant_derivative(Y, conn);
  Tensor<Expr> cubic(n, "dddd");
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t c = 0; c < n; ++c)
        for (std::size_t d = 0; d < n; ++d) {
          Expr v = DY(b, c, d, a) + DY(a, b, d, c) + DY(c, a, d, b);
          for (std::size_t e = 0; e < n; ++e) {
            if (!P(a, e).is_zero() && !W(e, d, c, b).is_zero()) v -= P(a, e) * W(e, d, c, b);
            if (!P(b, e).is_zero() && !W(e, d, a, c).is_zero()) v -= P(b, e) * W(e, d, a, c);
            if (!P(c, e).is_zero() && !W(e, d, b, a).is_zero()) v -= P(c, e) * W(e, d, b, a);
          }
          cubic(a, b, c, d) = v;
        }
  out.push_back(residual_of("cotton_cubic", cubic));
  return out;
}

std::vector<IdentityResidual> check_decomposition(const CurvaturePackage& pkg) {
  const std::size_t n = pkg.connection.dimension();
  const auto& W = pkg.weyl;
  const auto& P = pkg.schouten;
  Tensor<Expr> tr1(n, "dd"), tr2(n, "dd");
  for (std::size_t b = 0; b < n; ++b)
    for (std::size_t c = 0; c < n; ++c)
      for (std::size_t a = 0; a < n; ++a) {
        tr1(b, c) += W(a, a, b, c);
        tr2(b, c) += W(a, b, a, c);
      }
  Tensor<Expr> rec(n, "uddd");
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t c = 0; c < n; ++c)
        for (std::size_t d = 0; d < n; ++d) {
          Expr v = W(a, b, c, d);
          if (a == c) v += P(d, b);
          if (a == d) v -= P(c, b);
          if (a == b) v -= P(c, d) - P(d, c);
          rec(a, b, c, d) = v - pkg.riemann(a, b, c, d);
        }
  return {residual_of("weyl_trace_first", tr1), residual_of("weyl_trace_second", tr2),
          residual_of("recomposition", rec)};
}

}  // namespace projmetric
