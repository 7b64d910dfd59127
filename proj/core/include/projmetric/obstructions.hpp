#pragma once

// Obstruction tensors, endomorphism matrices, the stacked algebraic system
// and the prolongation matrices, written against a scalar field F (exact
// expressions or pointwise jets).
//
// Unknowns are ordered (g^ab for a <= b, row-major, m = n(n+1)/2 entries),
// then μ^a (n entries), then ρ.

#include <string>
#include <vector>

#include "projmetric/curvature.hpp"

namespace projmetric {

inline std::size_t sym_count(std::size_t n) { return n * (n + 1) / 2; }

// Position of g^ab (either order) in the unknown vector.
inline std::size_t sym_index(std::size_t n, std::size_t a, std::size_t b) {
  if (a > b) std::swap(a, b);
  return a * n - a * (a - 1) / 2 + (b - a);
}

inline std::pair<std::size_t, std::size_t> sym_pair(std::size_t n, std::size_t k) {
  for (std::size_t a = 0; a < n; ++a) {
    const std::size_t len = n - a;
    if (k < len) return {a, a + k};
    k -= len;
  }
  return {n, n};
}

// T(e,d,c,b,a,f) = ½δ^c_(a W^b_f)ed + ½δ^b_(a W^c_f)ed
//                + (1/n) W^c_(af)[e δ^b_d] + (1/n) W^b_(af)[e δ^c_d].
template <class F>
TensorOf<F> obstruction_T(const F& f, const TensorOf<F>& W) {
  using S = typename F::Scalar;
  const std::size_t n = W.dim();
  const Rat quarter(1, 4), q_n(1, 4 * static_cast<long>(n));
  TensorOf<F> T(n, "dduudd", f.zero());
  for (std::size_t e = 0; e < n; ++e)
    for (std::size_t d = e + 1; d < n; ++d)
      for (std::size_t c = 0; c < n; ++c)
        for (std::size_t b = 0; b < n; ++b)
          for (std::size_t a = 0; a < n; ++a)
            for (std::size_t g = a; g < n; ++g) {
              S v = f.zero();
              // ½ sym_(ag) [δ^c_a W^b_ged + δ^b_a W^c_ged], each sym term halved.
              S first = f.zero();
              if (c == a) first += W(b, g, e, d);
              if (c == g) first += W(b, a, e, d);
              if (b == a) first += W(c, g, e, d);
              if (b == g) first += W(c, a, e, d);
              v += f.scale(first, quarter);
              S second = f.zero();
              if (b == d) second += W(c, a, g, e) + W(c, g, a, e);
              if (b == e) second -= W(c, a, g, d) + W(c, g, a, d);
              if (c == d) second += W(b, a, g, e) + W(b, g, a, e);
              if (c == e) second -= W(b, a, g, d) + W(b, g, a, d);
              v += f.scale(second, q_n);
              T(e, d, c, b, a, g) = v;
              T(e, d, c, b, g, a) = v;
              T(d, e, c, b, a, g) = -v;
              T(d, e, c, b, g, a) = -v;
            }
  return T;
}

// Matrix of κ^af -> T_[ed]^cb_af κ^af on symmetric tensors with unit basis
// elements e_(ij), i <= j. Rows and columns follow sym_index.
template <class F>
std::vector<std::vector<typename F::Scalar>> tau_matrix(const F& f, const TensorOf<F>& T, std::size_t e, std::size_t d) {
  const std::size_t n = T.dim();
  const std::size_t m = sym_count(n);
  std::vector<std::vector<typename F::Scalar>> M(m, std::vector<typename F::Scalar>(m, f.zero()));
  for (std::size_t r = 0; r < m; ++r) {
    auto [c, b] = sym_pair(n, r);
    for (std::size_t k = 0; k < m; ++k) {
      auto [i, j] = sym_pair(n, k);
      M[r][k] = i == j ? T(e, d, c, b, i, j) : f.scale(T(e, d, c, b, i, j), Rat(2));
    }
  }
  return M;
}

// S(a,e,b,c,d) = ((n-2)/2) Y_ea(c δ^b_d) + ∇_(c W^b_d)ea + W^b_(cd)[e;a],
// from DW(b,x,y,z,w) = ∇_w W^b_xyz.
template <class F>
TensorOf<F> obstruction_S(const F& f, const TensorOf<F>& Y, const TensorOf<F>& DW) {
  using S = typename F::Scalar;
  const std::size_t n = Y.dim();
  const long nl = static_cast<long>(n);
  TensorOf<F> out(n, "ddudd", f.zero());
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t e = a + 1; e < n; ++e)
      for (std::size_t b = 0; b < n; ++b)
        for (std::size_t c = 0; c < n; ++c)
          for (std::size_t d = c; d < n; ++d) {
            S y = f.zero();
            if (b == d) y += Y(e, a, c);
            if (b == c) y += Y(e, a, d);
            S v = f.scale(y, Rat(nl - 2, 4));
            v += f.scale(DW(b, d, e, a, c) + DW(b, c, e, a, d), Rat(1, 2));
            v += f.scale(DW(b, c, d, e, a) + DW(b, d, c, e, a) - DW(b, c, d, a, e) - DW(b, d, c, a, e), Rat(1, 4));
            out(a, e, b, c, d) = v;
            out(a, e, b, d, c) = v;
            out(e, a, b, c, d) = -v;
            out(e, a, b, d, c) = -v;
          }
  return out;
}

// U(a,b,c,d) = ∇_[a Y_b](cd) + W^e_(cd)[a P_b]e, from DY(b,c,d,a) = ∇_a Y_bcd.
template <class F>
TensorOf<F> obstruction_U(const F& f, const TensorOf<F>& P, const TensorOf<F>& W, const TensorOf<F>& DY) {
  using S = typename F::Scalar;
  const std::size_t n = P.dim();
  TensorOf<F> out(n, "dddd", f.zero());
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      for (std::size_t c = 0; c < n; ++c)
        for (std::size_t d = c; d < n; ++d) {
          S v = DY(b, c, d, a) - DY(a, c, d, b) + DY(b, d, c, a) - DY(a, d, c, b);
          for (std::size_t e = 0; e < n; ++e) {
            S w = W(e, c, d, a) * P(b, e) - W(e, c, d, b) * P(a, e) + W(e, d, c, a) * P(b, e) - W(e, d, c, b) * P(a, e);
            v += w;
          }
          v = f.scale(v, Rat(1, 4));
          out(a, b, c, d) = v;
          out(a, b, d, c) = v;
          out(b, a, c, d) = -v;
          out(b, a, d, c) = -v;
        }
  return out;
}

enum class AlgebraicStage { T, IC1, I2 };

inline const char* stage_name(AlgebraicStage s) {
  switch (s) {
    case AlgebraicStage::T:
      return "algebraic_T";
    case AlgebraicStage::IC1:
      return "algebraic_ic1";
    default:
      return "algebraic_i2";
  }
}

// Rows over the m + n unknowns (g, μ):
//   T:   Σ T_[ed]^cb_af g^af = 0                          (e<d, c<=b)
//   IC1: Σ S_[ae]^b_cd g^cd - ((n+4)/2 W^b_cae + W^b_[ae]c) μ^c = 0   (a<e, b)
//   I2:  Σ U_[ab]cd g^cd + ((n+3)/2) Y_bac μ^c = 0          (a<b)
template <class F>
std::vector<std::vector<typename F::Scalar>> algebraic_rows(const F& f, AlgebraicStage stage, const TensorOf<F>& obstruction,
                                                             const TensorOf<F>& W, const TensorOf<F>& Y) {
  using S = typename F::Scalar;
  const std::size_t n = W.dim();
  const std::size_t m = sym_count(n);
  const long nl = static_cast<long>(n);
  std::vector<std::vector<S>> rows;
  auto gcoef = [&](auto&& get) {
    std::vector<S> r(m + n, f.zero());
    for (std::size_t k = 0; k < m; ++k) {
      auto [i, j] = sym_pair(n, k);
      r[k] = i == j ? get(i, j) : f.scale(get(i, j), Rat(2));
    }
    return r;
  };
  if (stage == AlgebraicStage::T) {
    for (std::size_t e = 0; e < n; ++e)
      for (std::size_t d = e + 1; d < n; ++d)
        for (std::size_t k = 0; k < m; ++k) {
          auto [c, b] = sym_pair(n, k);
          rows.push_back(gcoef([&](std::size_t i, std::size_t j) { return obstruction(e, d, c, b, i, j); }));
        }
  } else if (stage == AlgebraicStage::IC1) {
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t e = a + 1; e < n; ++e)
        for (std::size_t b = 0; b < n; ++b) {
          auto r = gcoef([&](std::size_t i, std::size_t j) { return obstruction(a, e, b, i, j); });
          for (std::size_t c = 0; c < n; ++c)
            r[m + c] = -(f.scale(W(b, c, a, e), Rat(nl + 4, 2)) + f.scale(W(b, a, e, c) - W(b, e, a, c), Rat(1, 2)));
          rows.push_back(std::move(r));
        }
  } else {
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a + 1; b < n; ++b) {
        auto r = gcoef([&](std::size_t i, std::size_t j) { return obstruction(a, b, i, j); });
        for (std::size_t c = 0; c < n; ++c) r[m + c] = f.scale(Y(b, a, c), Rat(nl + 3, 2));
        rows.push_back(std::move(r));
      }
  }
  return rows;
}

// B_a with ∂_a s = B_a s for the prolonged state s = (g^bc, μ^b, ρ):
//   ∂_a g^bc = μ^c δ^b_a + μ^b δ^c_a - Γ^b_da g^dc - Γ^c_da g^bd
//   ∂_a μ^b  = ρ δ^b_a - P_ac g^bc - (1/n) W^b_cda g^cd - Γ^b_da μ^d
//   ∂_a ρ    = -2 P_ab μ^b + (2/n) Y_abc g^bc
template <class F>
std::vector<std::vector<std::vector<typename F::Scalar>>> prolongation_matrices(const F& f, const TensorOf<F>& G,
                                                                                const TensorOf<F>& P, const TensorOf<F>& W,
                                                                                const TensorOf<F>& Y) {
  using S = typename F::Scalar;
  const std::size_t n = G.dim();
  const std::size_t m = sym_count(n);
  const std::size_t N = m + n + 1;
  const long nl = static_cast<long>(n);
  std::vector<std::vector<std::vector<S>>> B(n, std::vector<std::vector<S>>(N, std::vector<S>(N, f.zero())));
  for (std::size_t a = 0; a < n; ++a) {
    auto& M = B[a];
    for (std::size_t k = 0; k < m; ++k) {
      auto [b, c] = sym_pair(n, k);
      if (b == a) M[k][m + c] += f.constant(Rat(1));
      if (c == a) M[k][m + b] += f.constant(Rat(1));
      for (std::size_t d = 0; d < n; ++d) {
        M[k][sym_index(n, d, c)] -= G(b, d, a);
        M[k][sym_index(n, b, d)] -= G(c, d, a);
      }
    }
    for (std::size_t b = 0; b < n; ++b) {
      const std::size_t row = m + b;
      if (b == a) M[row][m + n] += f.constant(Rat(1));
      for (std::size_t c = 0; c < n; ++c) {
        M[row][sym_index(n, b, c)] -= P(a, c);
        for (std::size_t d = 0; d < n; ++d) M[row][sym_index(n, c, d)] -= f.scale(W(b, c, d, a), Rat(1, nl));
        M[row][m + c] -= G(b, c, a);
      }
    }
    for (std::size_t b = 0; b < n; ++b) {
      M[N - 1][m + b] -= f.scale(P(a, b), Rat(2));
      for (std::size_t c = 0; c < n; ++c) M[N - 1][sym_index(n, b, c)] += f.scale(Y(a, b, c), Rat(2, nl));
    }
  }
  return B;
}

}  // namespace projmetric
