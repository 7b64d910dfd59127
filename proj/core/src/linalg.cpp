#include "projmetric/linalg.hpp"

#include <stdexcept>

namespace projmetric {

Expr determinant(ExprMatrix m) {
  const std::size_t n = m.size();
  if (n == 0) return Expr(1);
  for (const auto& r : m)
    if (r.size() != n) throw std::invalid_argument("determinant of a non-square matrix");
  Expr prev(1);
  bool negate = false;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m[k][k].is_zero()) {
      std::size_t p = k + 1;
      while (p < n && m[p][k].is_zero()) ++p;
      if (p == n) return Expr();
      std::swap(m[p], m[k]);
      negate = !negate;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        Expr v = m[k][k] * m[i][j];
        if (!m[i][k].is_zero() && !m[k][j].is_zero()) v -= m[i][k] * m[k][j];
        m[i][j] = v / prev;
      }
      m[i][k] = Expr();
    }
    prev = m[k][k];
  }
  return negate ? -m[n - 1][n - 1] : m[n - 1][n - 1];
}

ExprMatrix inverse(const ExprMatrix& m) {
  const std::size_t n = m.size();
  Expr det = determinant(m);
  if (det.is_zero()) throw std::domain_error("singular matrix");
  ExprMatrix inv(n, std::vector<Expr>(n));
  if (n == 1) {
    inv[0][0] = det.inverse();
    return inv;
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      ExprMatrix minor;
      for (std::size_t r = 0; r < n; ++r) {
        if (r == i) continue;
        std::vector<Expr> row;
        for (std::size_t c = 0; c < n; ++c)
          if (c != j) row.push_back(m[r][c]);
        minor.push_back(std::move(row));
      }
      Expr cof = determinant(std::move(minor));
      if ((i + j) % 2) cof = -cof;
      inv[j][i] = cof / det;
    }
  return inv;
}

}  // namespace projmetric
