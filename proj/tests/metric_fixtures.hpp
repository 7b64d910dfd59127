#pragma once

#include "fixtures.hpp"
#include "projmetric/metric.hpp"

namespace fixtures {

// diag(±1) plus a sparse polynomial perturbation, symmetric.
inline Metric random_metric(std::mt19937& rng, const Chart& ch, std::size_t p) {
  const std::size_t n = ch.dimension();
  Tensor<Expr> g(n, "dd");
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a; b < n; ++b) {
      Expr v = random_poly(rng, ch, 2, 0.15, 1);
      if (a == b) v += Expr(a < p ? 3 : -3);
      g(a, b) = v;
      g(b, a) = v;
    }
  return Metric(ch, g);
}

// Example 2 metric in matrix form with g12 = -1: [[0,1/h,0],[1/h,0,0],[0,0,1/(2h^2)]].
inline Metric example2_metric(const Chart& ch) {
  Expr h = ch.f("h");
  Tensor<Expr> g(3, "dd");
  g(0, 1) = h.inverse();
  g(1, 0) = h.inverse();
  g(2, 2) = (Expr(2) * h * h).inverse();
  return Metric(ch, g);
}

// Unimodular metric with polynomial inverse: g = L^T D L for unit
// triangular L.
inline Metric unimodular_metric(const Chart& ch) {
  Tensor<Expr> g(3, "dd");
  Expr x = ch.x(0), y = ch.x(1), z = ch.x(2);
  Expr l10 = y * z, l20 = x, l21 = x * y + Expr(1);
  // rows of L: (1,0,0), (l10,1,0), (l20,l21,1); D = diag(1,1,-1)
  Expr L[3][3] = {{Expr(1), Expr(), Expr()}, {l10, Expr(1), Expr()}, {l20, l21, Expr(1)}};
  int D[3] = {1, 1, -1};
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = 0; b < 3; ++b) {
      Expr v;
      for (std::size_t k = 0; k < 3; ++k) v += Expr(D[k]) * L[k][a] * L[k][b];
      g(a, b) = v;
    }
  return Metric(ch, g);
}

}  // namespace fixtures
