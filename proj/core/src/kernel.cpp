#include "projmetric/kernel.hpp"

#include <algorithm>
#include <tuple>

#include <Eigen/SVD>

namespace projmetric {

namespace {

// Smaller is simpler.
std::tuple<int, std::size_t> pivot_cost(const Expr& e) {
  if (e.is_constant()) return {0, 0};
  const bool mono = e.num().is_monomial() && e.den().is_monomial();
  return {mono ? 1 : 2, e.size()};
}

// Primitive part with the monomial content removed.
Poly condition_of(const Poly& p) {
  Poly q = p.primitive_part();
  if (q.size() < 2) return q;
  Monomial g = q.terms().front().mono;
  for (const auto& t : q.terms()) g = gcd(g, t.mono);
  if (g.is_one()) return q;
  std::vector<Term> ts;
  for (const auto& t : q.terms()) ts.push_back({t.mono / g, t.coef});
  return Poly::from_terms(std::move(ts));
}

}  // namespace

bool is_critical_assumption(const Expr& e) { return !e.is_constant() && !e.num().is_monomial(); }

SymbolicKernel symbolic_kernel(const ExprMatrix& input, std::size_t columns) {
  SymbolicKernel out;
  out.columns = columns;
  ExprMatrix rows;
  for (const auto& r : input) {
    if (r.size() != columns) throw std::invalid_argument("row length does not match column count");
    if (std::any_of(r.begin(), r.end(), [](const Expr& e) { return !e.is_zero(); })) rows.push_back(r);
  }
  std::vector<std::size_t> pivot_col;  // per reduced row
  std::vector<bool> is_pivot(columns, false);
  std::size_t done = 0;
  while (done < rows.size()) {
    // Choose the simplest nonzero entry among the remaining rows.
    std::size_t br = rows.size(), bc = columns;
    std::tuple<int, std::size_t> best{3, 0};
    for (std::size_t i = done; i < rows.size(); ++i)
      for (std::size_t j = 0; j < columns; ++j) {
        if (is_pivot[j] || rows[i][j].is_zero()) continue;
        auto c = pivot_cost(rows[i][j]);
        if (br == rows.size() || c < best) {
          best = c;
          br = i;
          bc = j;
        }
      }
    if (br == rows.size()) break;
    std::swap(rows[done], rows[br]);
    auto& pr = rows[done];
    Expr piv = pr[bc];
    if (!piv.is_constant()) {
      Expr a(condition_of(piv.num()));
      if (std::find(out.assumptions.begin(), out.assumptions.end(), a) == out.assumptions.end())
        out.assumptions.push_back(a);
    }
    Expr inv = piv.inverse();
    for (auto& e : pr)
      if (!e.is_zero()) e = e * inv;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i == done || rows[i][bc].is_zero()) continue;
      Expr fct = rows[i][bc];
      for (std::size_t j = 0; j < columns; ++j)
        if (!pr[j].is_zero()) rows[i][j] -= fct * pr[j];
    }
    is_pivot[bc] = true;
    pivot_col.push_back(bc);
    ++done;
    // Drop rows that became zero.
    for (std::size_t i = done; i < rows.size();) {
      if (std::all_of(rows[i].begin(), rows[i].end(), [](const Expr& e) { return e.is_zero(); })) {
        rows.erase(rows.begin() + static_cast<std::ptrdiff_t>(i));
      } else {
        ++i;
      }
    }
  }
  out.rank = pivot_col.size();
  for (std::size_t j = 0; j < columns; ++j) {
    if (is_pivot[j]) continue;
    std::vector<Expr> v(columns);
    v[j] = Expr(1);
    for (std::size_t i = 0; i < pivot_col.size(); ++i)
      if (!rows[i][j].is_zero()) v[pivot_col[i]] = -rows[i][j];
    out.basis.push_back(std::move(v));
    out.free_columns.push_back(j);
  }
  return out;
}

NumericKernel numeric_kernel(const std::vector<std::vector<double>>& rows, std::size_t columns, double rel_tol) {
  NumericKernel out;
  out.columns = columns;
  const std::size_t r = std::max<std::size_t>(rows.size(), columns);
  // Pad to at least a square matrix so the full right singular basis exists.
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(columns));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != columns) throw std::invalid_argument("row length does not match column count");
    for (std::size_t j = 0; j < columns; ++j) M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  for (Eigen::Index i = 0; i < s.size(); ++i) out.singular_values.push_back(s(i));
  const double top = s.size() ? s(0) : 0.0;
  std::size_t rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > rel_tol * top && s(i) > 0) ++rank;
  out.rank = rank;
  const auto& V = svd.matrixV();
  for (std::size_t k = rank; k < columns; ++k) {
    std::vector<double> v(columns);
    for (std::size_t j = 0; j < columns; ++j) v[j] = V(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k));
    out.basis.push_back(std::move(v));
  }
  return out;
}

}  // namespace projmetric
