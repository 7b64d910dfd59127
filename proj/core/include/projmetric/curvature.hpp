#pragma once

// Curvature algorithms written once against a scalar field (ExprField for
// exact work, JetField for pointwise numerics).
//
// Conventions: Gamma(a,b,c) = Γ^a_{bc}, last index is the derivative
// direction. R(a,b,c,d) = R^a_{bcd}, antisymmetric in (c,d). Ricci R_ab =
// R^c_{acb}. Covariant derivatives append their index as the last slot.

#include <vector>

#include "projmetric/tensor.hpp"

namespace projmetric {

template <class F>
using TensorOf = Tensor<typename F::Scalar>;

template <class F>
TensorOf<F> riemann_tensor(const F& f, const TensorOf<F>& G) {
  using S = typename F::Scalar;
  const std::size_t n = G.dim();
  TensorOf<F> dG(n, "uddd", f.zero());
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t c = b; c < n; ++c) {
        const S& g = G(a, b, c);
        if (f.is_zero(g)) continue;
        for (std::size_t e = 0; e < n; ++e) {
          S v = f.d(g, e);
          dG(a, c, b, e) = v;
          dG(a, b, c, e) = std::move(v);
        }
      }
  TensorOf<F> R(n, "uddd", f.zero());
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t c = 0; c < n; ++c)
        for (std::size_t d = c + 1; d < n; ++d) {
          S v = dG(a, b, d, c) - dG(a, b, c, d);
          for (std::size_t e = 0; e < n; ++e) {
            const S& g1 = G(a, e, c);
            const S& g2 = G(e, b, d);
            if (!f.is_zero(g1) && !f.is_zero(g2)) v += g1 * g2;
            const S& g3 = G(a, e, d);
            const S& g4 = G(e, b, c);
            if (!f.is_zero(g3) && !f.is_zero(g4)) v -= g3 * g4;
          }
          R(a, b, d, c) = -v;
          R(a, b, c, d) = std::move(v);
        }
  return R;
}

template <class F>
TensorOf<F> ricci_tensor(const F& f, const TensorOf<F>& R) {
  const std::size_t n = R.dim();
  TensorOf<F> Ric(n, "dd", f.zero());
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t c = 0; c < n; ++c)
        if (!f.is_zero(R(c, a, c, b))) Ric(a, b) += R(c, a, c, b);
  return Ric;
}

// P_ab = R_(ab)/(n-1) - R_[ab]/(n+1).
template <class F>
TensorOf<F> schouten_tensor(const F& f, const TensorOf<F>& Ric) {
  const long n = static_cast<long>(Ric.dim());
  TensorOf<F> P(Ric.dim(), "dd", f.zero());
  for (std::size_t a = 0; a < Ric.dim(); ++a)
    for (std::size_t b = 0; b < Ric.dim(); ++b)
      P(a, b) = f.scale(Ric(a, b) + Ric(b, a), Rat(1, 2 * (n - 1))) - f.scale(Ric(a, b) - Ric(b, a), Rat(1, 2 * (n + 1)));
  return P;
}

// W = R - (δ^a_c P_db - δ^a_d P_cb - 2 δ^a_b P_[cd]).
template <class F>
TensorOf<F> weyl_tensor(const F&, const TensorOf<F>& R, const TensorOf<F>& P) {
  const std::size_t n = R.dim();
  TensorOf<F> W = R;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t c = 0; c < n; ++c)
        for (std::size_t d = 0; d < n; ++d) {
          if (c == d) continue;
          auto& w = W(a, b, c, d);
          if (a == c) w -= P(d, b);
          if (a == d) w += P(c, b);
          if (a == b) w += P(c, d) - P(d, c);
        }
  return W;
}

template <class F>
TensorOf<F> covariant_derivative_of(const F& f, const TensorOf<F>& G, const TensorOf<F>& t) {
  using S = typename F::Scalar;
  const std::size_t n = t.dim();
  const std::size_t r = t.rank();
  TensorOf<F> out(n, t.variance() + "d", f.zero());
  std::vector<std::size_t> idx(r), src(r);
  for (std::size_t k = 0; k < t.size(); ++k) {
    t.unflatten(k, idx.data());
    for (std::size_t c = 0; c < n; ++c) {
      S v = f.is_zero(t.flat(k)) ? f.zero() : f.d(t.flat(k), c);
      for (std::size_t s = 0; s < r; ++s) {
        src = idx;
        for (std::size_t e = 0; e < n; ++e) {
          src[s] = e;
          const S& te = t.at(src);
          if (f.is_zero(te)) continue;
          if (t.variance()[s] == 'u') {
            const S& g = G(idx[s], e, c);
            if (!f.is_zero(g)) v += g * te;
          } else {
            const S& g = G(e, idx[s], c);
            if (!f.is_zero(g)) v -= g * te;
          }
        }
      }
      out.flat(k * n + c) = std::move(v);
    }
  }
  return out;
}

// Y_bca = ∇_b P_ca - ∇_c P_ba, from DP(c,a,b) = ∇_b P_ca.
template <class F>
TensorOf<F> cotton_tensor(const F& f, const TensorOf<F>& DP) {
  const std::size_t n = DP.dim();
  TensorOf<F> Y(n, "ddd", f.zero());
  for (std::size_t b = 0; b < n; ++b)
    for (std::size_t c = 0; c < n; ++c)
      for (std::size_t a = 0; a < n; ++a) Y(b, c, a) = DP(c, a, b) - DP(b, a, c);
  return Y;
}

// Gauge change Γ^a_bc + δ^a_c A_b + δ^a_b A_c.
template <class F>
TensorOf<F> gauge_gamma(const F& f, const TensorOf<F>& G, const std::vector<typename F::Scalar>& A) {
  (void)f;
  TensorOf<F> H = G;
  const std::size_t n = G.dim();
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      H(a, b, a) += A[b];
      H(a, a, b) += A[b];
    }
  return H;
}

template <class F>
struct CurvatureSet {
  TensorOf<F> riemann, ricci, schouten, weyl, cotton;
};

template <class F>
CurvatureSet<F> curvature_set(const F& f, const TensorOf<F>& G) {
  CurvatureSet<F> s;
  s.riemann = riemann_tensor(f, G);
  s.ricci = ricci_tensor(f, s.riemann);
  s.schouten = schouten_tensor(f, s.ricci);
  s.weyl = weyl_tensor(f, s.riemann, s.schouten);
  s.cotton = cotton_tensor(f, covariant_derivative_of(f, G, s.schouten));
  return s;
}

}  // namespace projmetric
