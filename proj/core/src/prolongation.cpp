#include "projmetric/prolongation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include <Eigen/LU>
#include <boost/numeric/odeint.hpp>

#include "projmetric/forms.hpp"
#include "projmetric/linalg.hpp"
#include "projmetric/obstructions.hpp"

namespace projmetric {

ProlongationConnection prolongation_connection(const CurvaturePackage& pkg) {
  const std::size_t n = pkg.connection.dimension();
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      if (pkg.schouten(a, b) != pkg.schouten(b, a)) throw NotSpecial("Schouten tensor is not symmetric");
  ExprField f(pkg.connection.chart());
  ProlongationConnection pc;
  pc.n = n;
  pc.B = prolongation_matrices(f, pkg.connection.gamma(), pkg.schouten, pkg.weyl, pkg.cotton);
  return pc;
}

ExprMatrix multiply(const ExprMatrix& a, const ExprMatrix& b) {
  if (a.empty()) return {};
  const std::size_t r = a.size(), k = b.size(), c = b.empty() ? 0 : b[0].size();
  ExprMatrix out(r, std::vector<Expr>(c));
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t l = 0; l < k; ++l) {
      if (a[i][l].is_zero()) continue;
      for (std::size_t j = 0; j < c; ++j)
        if (!b[l][j].is_zero()) out[i][j] += a[i][l] * b[l][j];
    }
  return out;
}

ExprMatrix column_matrix(const std::vector<std::vector<Expr>>& columns, std::size_t rows) {
  ExprMatrix out(rows, std::vector<Expr>(columns.size()));
  for (std::size_t j = 0; j < columns.size(); ++j)
    for (std::size_t i = 0; i < rows; ++i) out[i][j] = columns[j][i];
  return out;
}

bool forced_degenerate(const ExprMatrix& V, std::size_t n) {
  const std::size_t r = V.empty() ? 0 : V[0].size();
  if (r == 0) return true;
  std::vector<Expr> p(r);
  for (std::size_t k = 0; k < r; ++k) p[k] = Expr(Poly::var(Var::make(VarKind::Auxiliary, static_cast<std::uint32_t>(k))));
  ExprMatrix g(n, std::vector<Expr>(n));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a; b < n; ++b) {
      Expr v;
      const auto& row = V[sym_index(n, a, b)];
      for (std::size_t k = 0; k < r; ++k)
        if (!row[k].is_zero()) v += row[k] * p[k];
      g[a][b] = v;
      g[b][a] = v;
    }
  return determinant(g).is_zero();
}

namespace {

ExprMatrix derivative(const ExprMatrix& m, const Chart& chart, std::size_t a) {
  ExprMatrix out = m;
  for (auto& r : out)
    for (auto& e : r)
      if (!e.is_zero()) e = chart.differentiate(e, a);
  return out;
}

void append_unique(std::vector<Expr>& dst, const std::vector<Expr>& src) {
  for (const auto& e : src)
    if (std::find(dst.begin(), dst.end(), e) == dst.end()) dst.push_back(e);
}

}  // namespace

ReducedSystem reduce_prolongation(const ProlongationConnection& pc, const Chart& chart, ExprMatrix V,
                                  std::vector<std::size_t> identity_rows, std::size_t max_iterations) {
  const std::size_t n = pc.n;
  ReducedSystem rs;
  rs.V = std::move(V);
  rs.identity_rows = std::move(identity_rows);
  auto restrict_to = [&](const ExprMatrix& rows) {
    const std::size_t r = rs.rank();
    auto k = symbolic_kernel(rows, r);
    append_unique(rs.assumptions, k.assumptions);
    rs.last_constraints.clear();
    for (const auto& row : rows)
      for (const auto& e : row)
        if (!e.is_zero() && rs.last_constraints.size() < 8) rs.last_constraints.push_back(e);
    ExprMatrix Vp = column_matrix(k.basis, r);
    std::vector<std::size_t> ids;
    for (std::size_t j : k.free_columns) ids.push_back(rs.identity_rows[j]);
    rs.V = k.basis.empty() ? ExprMatrix(rs.V.size(), std::vector<Expr>()) : multiply(rs.V, Vp);
    rs.identity_rows = std::move(ids);
    if (rs.rank() == 0) {
      rs.status = ReducedSystem::Status::Empty;
      return false;
    }
    if (forced_degenerate(rs.V, n)) {
      rs.status = ReducedSystem::Status::Degenerate;
      return false;
    }
    return true;
  };

  if (rs.rank() == 0) {
    rs.status = ReducedSystem::Status::Empty;
    return rs;
  }
  while (rs.iterations < max_iterations) {
    ++rs.iterations;
    const std::size_t r = rs.rank();
    rs.M.assign(n, ExprMatrix());
    ExprMatrix constraints;
    for (std::size_t a = 0; a < n; ++a) {
      ExprMatrix K = multiply(pc.B[a], rs.V);
      ExprMatrix dV = derivative(rs.V, chart, a);
      for (std::size_t i = 0; i < K.size(); ++i)
        for (std::size_t j = 0; j < r; ++j)
          if (!dV[i][j].is_zero()) K[i][j] -= dV[i][j];
      ExprMatrix Ma(r);
      for (std::size_t k = 0; k < r; ++k) Ma[k] = K[rs.identity_rows[k]];
      ExprMatrix VM = multiply(rs.V, Ma);
      for (std::size_t i = 0; i < K.size(); ++i) {
        std::vector<Expr> q(r);
        bool nz = false;
        for (std::size_t j = 0; j < r; ++j) {
          q[j] = K[i][j] - VM[i][j];
          nz |= !q[j].is_zero();
        }
        if (nz) constraints.push_back(std::move(q));
      }
      rs.M[a] = std::move(Ma);
    }
    if (!constraints.empty()) {
      if (!restrict_to(constraints)) return rs;
      continue;
    }
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a + 1; b < n; ++b) {
        ExprMatrix F = derivative(rs.M[a], chart, b);
        ExprMatrix dMb = derivative(rs.M[b], chart, a);
        ExprMatrix AB = multiply(rs.M[a], rs.M[b]), BA = multiply(rs.M[b], rs.M[a]);
        for (std::size_t i = 0; i < r; ++i)
          for (std::size_t j = 0; j < r; ++j) F[i][j] += AB[i][j] - BA[i][j] - dMb[i][j];
        for (auto& row : F)
          if (std::any_of(row.begin(), row.end(), [](const Expr& e) { return !e.is_zero(); }))
            constraints.push_back(row);
      }
    if (constraints.empty()) {
      rs.status = ReducedSystem::Status::Flat;
      return rs;
    }
    if (!restrict_to(constraints)) return rs;
  }
  throw std::runtime_error("prolongation did not stabilize");
}

std::optional<ExprMatrix> integrate_exact(const std::vector<ExprMatrix>& M, const Chart& chart) {
  const std::size_t n = M.size();
  const std::size_t r = M.empty() ? 0 : M[0].size();
  // Dependency graph: i depends on j when some M_a[i][j] != 0.
  std::vector<std::vector<std::size_t>> deps(r);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < r; ++j) {
      bool nz = false;
      for (const auto& Ma : M) nz |= !Ma[i][j].is_zero();
      if (!nz) continue;
      if (i == j) return std::nullopt;
      deps[i].push_back(j);
    }
  std::vector<std::size_t> order;
  std::vector<int> state(r, 0);
  std::function<bool(std::size_t)> visit = [&](std::size_t v) {
    if (state[v] == 2) return true;
    if (state[v] == 1) return false;
    state[v] = 1;
    for (std::size_t d : deps[v])
      if (!visit(d)) return false;
    state[v] = 2;
    order.push_back(v);
    return true;
  };
  for (std::size_t v = 0; v < r; ++v)
    if (!visit(v)) return std::nullopt;

  ExprMatrix Phi(r, std::vector<Expr>(r));
  for (std::size_t col = 0; col < r; ++col) {
    const std::size_t k = order[col];
    std::vector<Expr> q(r);
    for (std::size_t i : order) {
      if (i == k) {
        q[i] = Expr(1);
        continue;
      }
      std::vector<Expr> w(n);
      bool nz = false;
      for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t j : deps[i])
          if (!M[a][i][j].is_zero() && !q[j].is_zero()) w[a] += M[a][i][j] * q[j];
        nz |= !w[a].is_zero();
      }
      if (!nz) continue;
      std::optional<ScalarForm> prim;
      try {
        prim = find_primitive(ScalarForm::one_form(w), chart);
      } catch (const NotClosed&) {
        return std::nullopt;
      }
      if (!prim) return std::nullopt;
      q[i] = (*prim)();
    }
    for (std::size_t i = 0; i < r; ++i) Phi[i][k] = q[i];
  }
  return Phi;
}

void split_state(std::size_t n, std::span<const double> s, std::vector<double>& g_upper, std::vector<double>& mu) {
  const std::size_t m = sym_count(n);
  g_upper.assign(n * n, 0.0);
  mu.assign(n, 0.0);
  for (std::size_t k = 0; k < m; ++k) {
    auto [a, b] = sym_pair(n, k);
    g_upper[a * n + b] = s[k];
    g_upper[b * n + a] = s[k];
  }
  for (std::size_t a = 0; a < n; ++a) mu[a] = s[m + a];
}

namespace {

class NumericTransport final : public LinearTransport {
 public:
  NumericTransport(const Connection& conn, const NumericEnv& env) : chart_(conn.chart()), env_(env), n_(conn.dimension()) {
    for (std::size_t k = 0; k < conn.gamma().size(); ++k) gamma_.emplace_back(conn.gamma().flat(k), chart_);
  }
  std::size_t dim() const override { return sym_count(n_) + n_ + 1; }
  std::size_t n() const override { return n_; }
  void matrix(std::span<const double> x, std::size_t a, double* out) override {
    if (cached_ != std::vector<double>(x.begin(), x.end())) fill(x);
    const std::size_t N = dim();
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < N; ++j) out[i * N + j] = B_[a][i][j];
  }
  std::vector<double> full_state(std::span<const double>, std::span<const double> q) override {
    return std::vector<double>(q.begin(), q.end());
  }
  std::vector<double> full_state_derivative(std::span<const double> x, std::span<const double> q, std::size_t a) override {
    if (cached_ != std::vector<double>(x.begin(), x.end())) fill(x);
    std::vector<double> out(q.size(), 0.0);
    for (std::size_t i = 0; i < q.size(); ++i)
      for (std::size_t j = 0; j < q.size(); ++j) out[i] += B_[a][i][j] * q[j];
    return out;
  }

 private:
  void fill(std::span<const double> x) {
    PointEvaluator ev(chart_, env_, x, 2);
    JetField jf(ev.layout(), 2);
    Tensor<Jet> G(n_, "udd", jf.zero());
    for (std::size_t k = 0; k < G.size(); ++k)
      if (!gamma_[k].is_zero()) G.flat(k) = ev.jet(gamma_[k]);
    auto cs = curvature_set(jf, G);
    auto Bj = prolongation_matrices(jf, G, cs.schouten, cs.weyl, cs.cotton);
    B_.assign(n_, std::vector<std::vector<double>>());
    for (std::size_t a = 0; a < n_; ++a) {
      B_[a].assign(Bj[a].size(), std::vector<double>(Bj[a].size()));
      for (std::size_t i = 0; i < Bj[a].size(); ++i)
        for (std::size_t j = 0; j < Bj[a].size(); ++j) B_[a][i][j] = Bj[a][i][j].value();
    }
    cached_.assign(x.begin(), x.end());
  }

  Chart chart_;
  NumericEnv env_;
  std::size_t n_;
  std::vector<CompiledExpr> gamma_;
  std::vector<double> cached_;
  std::vector<std::vector<std::vector<double>>> B_;
};

class ReducedTransport final : public LinearTransport {
 public:
  ReducedTransport(const ReducedSystem& rs, const Chart& chart, const NumericEnv& env)
      : chart_(chart), env_(env), n_(rs.M.size()), r_(rs.rank()), N_(rs.V.size()) {
    for (const auto& Ma : rs.M) {
      std::vector<CompiledExpr> c;
      for (const auto& row : Ma)
        for (const auto& e : row) c.emplace_back(e, chart);
      M_.push_back(std::move(c));
    }
    for (const auto& row : rs.V)
      for (const auto& e : row) V_.emplace_back(e, chart);
    // ∂_a V + V M_a
    for (std::size_t a = 0; a < n_; ++a) {
      ExprMatrix D = multiply(rs.V, rs.M[a]);
      std::vector<CompiledExpr> c;
      for (std::size_t i = 0; i < N_; ++i)
        for (std::size_t j = 0; j < r_; ++j) {
          if (!rs.V[i][j].is_zero()) D[i][j] += chart.differentiate(rs.V[i][j], a);
          c.emplace_back(D[i][j], chart);
        }
      dV_.push_back(std::move(c));
    }
  }
  std::size_t dim() const override { return r_; }
  std::size_t n() const override { return n_; }
  void matrix(std::span<const double> x, std::size_t a, double* out) override {
    PointEvaluator ev(chart_, env_, x, 0);
    for (std::size_t k = 0; k < r_ * r_; ++k) out[k] = M_[a][k].is_zero() ? 0.0 : ev.value(M_[a][k]);
  }
  std::vector<double> full_state(std::span<const double> x, std::span<const double> q) override {
    PointEvaluator ev(chart_, env_, x, 0);
    std::vector<double> s(N_, 0.0);
    for (std::size_t i = 0; i < N_; ++i)
      for (std::size_t j = 0; j < r_; ++j)
        if (!V_[i * r_ + j].is_zero()) s[i] += ev.value(V_[i * r_ + j]) * q[j];
    return s;
  }
  std::vector<double> full_state_derivative(std::span<const double> x, std::span<const double> q, std::size_t a) override {
    PointEvaluator ev(chart_, env_, x, 0);
    std::vector<double> s(N_, 0.0);
    for (std::size_t i = 0; i < N_; ++i)
      for (std::size_t j = 0; j < r_; ++j)
        if (!dV_[a][i * r_ + j].is_zero()) s[i] += ev.value(dV_[a][i * r_ + j]) * q[j];
    return s;
  }

 private:
  Chart chart_;
  NumericEnv env_;
  std::size_t n_, r_, N_;
  std::vector<std::vector<CompiledExpr>> M_;
  std::vector<CompiledExpr> V_;
  std::vector<std::vector<CompiledExpr>> dV_;
};

// One axis-parallel leg: coordinate a from x[a] to target, state y of size
// cols * dim (+1 for φ).
void leg(LinearTransport& tr, std::vector<double>& x, std::size_t a, double target, std::vector<double>& y,
         std::size_t cols, bool phi, double tol) {
  namespace ode = boost::numeric::odeint;
  const double len = target - x[a];
  if (len == 0) return;
  const double sign = len > 0 ? 1.0 : -1.0;
  const double x0 = x[a];
  const std::size_t d = tr.dim();
  const std::size_t n = tr.n();
  std::vector<double> M(d * d), pt = x, g, mu;
  auto rhs = [&](const std::vector<double>& s, std::vector<double>& ds, double t) {
    pt[a] = x0 + sign * t;
    try {
      tr.matrix(pt, a, M.data());
    } catch (const EvaluationError& e) {
      throw TransportError(e.what());
    }
    for (std::size_t c = 0; c < cols; ++c)
      for (std::size_t i = 0; i < d; ++i) {
        double v = 0;
        for (std::size_t j = 0; j < d; ++j) v += M[i * d + j] * s[j * cols + c];
        ds[i * cols + c] = sign * v;
      }
    if (phi) {
      auto full = tr.full_state(pt, std::span<const double>(s.data(), d));
      split_state(n, full, g, mu);
      Eigen::Map<Eigen::MatrixXd> G(g.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
      Eigen::MatrixXd gl = G.inverse();
      double A = 0;
      for (std::size_t b = 0; b < n; ++b) A -= gl(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) * mu[b];
      ds[d * cols] = sign * A;
    }
    for (double v : ds)
      if (!std::isfinite(v)) throw TransportError("non-finite transport coefficients");
  };
  auto stepper = ode::make_controlled(tol, tol, ode::runge_kutta_dopri5<std::vector<double>>());
  ode::integrate_adaptive(stepper, rhs, y, 0.0, std::abs(len), std::abs(len) / 64);
  x[a] = target;
}

}  // namespace

std::unique_ptr<LinearTransport> make_numeric_transport(const Connection& special, const NumericEnv& env) {
  return std::make_unique<NumericTransport>(special, env);
}

std::unique_ptr<LinearTransport> make_reduced_transport(const ReducedSystem& rs, const Chart& chart, const NumericEnv& env) {
  return std::make_unique<ReducedTransport>(rs, chart, env);
}

TransportResult transport(LinearTransport& tr, std::span<const double> from, std::span<const double> to,
                          std::span<const double> q0, const TransportOptions& opt) {
  const std::size_t n = tr.n(), d = tr.dim();
  if (q0.size() != d) throw std::invalid_argument("transport state has wrong size");
  std::vector<double> x(from.begin(), from.end());
  std::vector<double> y(q0.begin(), q0.end());
  if (opt.track_phi) y.push_back(0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t a = opt.reverse_order ? n - 1 - i : i;
    leg(tr, x, a, to[a], y, 1, opt.track_phi, opt.tolerance);
  }
  TransportResult r;
  r.q.assign(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(d));
  if (opt.track_phi) r.phi = y[d];
  return r;
}

std::vector<double> transport_matrix(LinearTransport& tr, std::span<const double> from, std::span<const double> to,
                                     const TransportOptions& opt) {
  const std::size_t n = tr.n(), d = tr.dim();
  std::vector<double> x(from.begin(), from.end());
  std::vector<double> y(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i) y[i * d + i] = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t a = opt.reverse_order ? n - 1 - i : i;
    leg(tr, x, a, to[a], y, d, false, opt.tolerance);
  }
  return y;
}

}  // namespace projmetric
