#include "projmetric/metrisability.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/Dense>

#include "projmetric/linalg.hpp"
#include "projmetric/metric.hpp"
#include "projmetric/obstructions.hpp"

namespace projmetric {

const char* to_string(Backend b) {
  switch (b) {
    case Backend::Symbolic:
      return "symbolic";
    case Backend::Numeric:
      return "numeric";
    default:
      return "auto";
  }
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Metrisable:
      return "Metrisable";
    case Verdict::NotMetrisable:
      return "NotMetrisable";
    default:
      return "Inconclusive";
  }
}

namespace {

using Pairs = std::vector<std::pair<std::size_t, std::size_t>>;

// Relative row norm below which a numeric obstruction row is treated as zero.
constexpr double kNegligibleRow = 1e-10;

Pairs index_pairs(std::size_t n) {
  Pairs out;
  for (std::size_t e = 0; e < n; ++e)
    for (std::size_t d = e + 1; d < n; ++d) out.emplace_back(e, d);
  return out;
}

std::string pair_label(std::size_t e, std::size_t d) { return std::to_string(e + 1) + std::to_string(d + 1); }

double det_of(const std::vector<std::vector<double>>& m) {
  const auto k = static_cast<Eigen::Index>(m.size());
  Eigen::MatrixXd M(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j) M(i, j) = m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return M.determinant();
}

Tensor<Jet> gamma_jets(const Connection& conn, PointEvaluator& ev, const JetField& jf) {
  Tensor<Jet> G(conn.dimension(), "udd", jf.zero());
  for (std::size_t k = 0; k < G.size(); ++k)
    if (!conn.gamma().flat(k).is_zero()) G.flat(k) = ev.jet(CompiledExpr(conn.gamma().flat(k), conn.chart()));
  return G;
}

std::vector<double> default_base(std::size_t n) {
  static const double v[] = {0.31, 0.47, 0.73, 0.89, 0.57, 0.41, 0.67, 0.37};
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = v[i % 8];
  return x;
}

std::string expr_string(const Expr& e, const Chart& ch) { return to_string(e, ch); }

void append_unique(std::vector<Expr>& dst, const std::vector<Expr>& src) {
  for (const auto& e : src)
    if (std::find(dst.begin(), dst.end(), e) == dst.end()) dst.push_back(e);
}

std::vector<Expr> critical_of(const std::vector<Expr>& v) {
  std::vector<Expr> out;
  for (const auto& e : v)
    if (is_critical_assumption(e)) out.push_back(e);
  return out;
}

// Metric sample from exact ĝ_ab.
std::function<MetricSample(std::span<const double>)> exact_sampler(const Chart& chart, const Tensor<Expr>& metric,
                                                                   const NumericEnv& env) {
  const std::size_t n = chart.dimension();
  struct Compiled {
    Chart chart;
    NumericEnv env;
    std::vector<CompiledExpr> g, dg;
  };
  auto c = std::make_shared<Compiled>();
  c->chart = chart;
  c->env = env;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      c->g.emplace_back(metric(a, b), c->chart);
      for (std::size_t k = 0; k < n; ++k) c->dg.emplace_back(chart.differentiate(metric(a, b), k), c->chart);
    }
  return [c, n](std::span<const double> x) {
    PointEvaluator ev(c->chart, c->env, x, 0);
    MetricSample s;
    s.x.assign(x.begin(), x.end());
    for (const auto& e : c->g) s.g.push_back(e.is_zero() ? 0.0 : ev.value(e));
    for (const auto& e : c->dg) s.dg.push_back(e.is_zero() ? 0.0 : ev.value(e));
    (void)n;
    return s;
  };
}

// ĝ = e^{2φ} g_ab from a full state; ∂_c ĝ_ab = e^{2φ} (2 A_c g_ab + ∂_c g_ab)
// with A_c = -g_cb μ^b and ∂g_ab = -g_ae ∂g^ef g_fb.
MetricSample sample_from_state(std::size_t n, std::span<const double> x, const std::vector<double>& s,
                               const std::vector<std::vector<double>>& ds, double phi) {
  std::vector<double> gu, mu;
  split_state(n, s, gu, mu);
  const auto N = static_cast<Eigen::Index>(n);
  Eigen::Map<Eigen::MatrixXd> GU(gu.data(), N, N);
  Eigen::MatrixXd gl = GU.inverse();
  Eigen::VectorXd A = -gl * Eigen::Map<Eigen::VectorXd>(mu.data(), N);
  const double w = std::exp(2 * phi);
  MetricSample out;
  out.x.assign(x.begin(), x.end());
  out.g.resize(n * n);
  out.dg.resize(n * n * n);
  std::vector<Eigen::MatrixXd> dgl(n);
  for (std::size_t c = 0; c < n; ++c) {
    std::vector<double> dgu, dmu;
    split_state(n, ds[c], dgu, dmu);
    Eigen::Map<Eigen::MatrixXd> DGU(dgu.data(), N, N);
    dgl[c] = -gl * DGU * gl;
  }
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      const auto ai = static_cast<Eigen::Index>(a), bi = static_cast<Eigen::Index>(b);
      out.g[a * n + b] = w * gl(ai, bi);
      for (std::size_t c = 0; c < n; ++c)
        out.dg[(a * n + b) * n + c] = w * (2 * A(static_cast<Eigen::Index>(c)) * gl(ai, bi) + dgl[c](ai, bi));
    }
  return out;
}

// Sampler and path-defect probe for a parallel state q0 at base.
void attach_transport(MetricCandidate& c, std::shared_ptr<LinearTransport> tr, std::vector<double> q0,
                      std::vector<double> base, double tol) {
  const std::size_t n = c.n;
  auto at = [tr, q0, base, tol, n](std::span<const double> x, bool reverse) {
    TransportOptions o;
    o.tolerance = tol;
    o.track_phi = true;
    o.reverse_order = reverse;
    auto res = transport(*tr, base, x, q0, o);
    auto s = tr->full_state(x, res.q);
    std::vector<std::vector<double>> ds;
    for (std::size_t a = 0; a < n; ++a) ds.push_back(tr->full_state_derivative(x, res.q, a));
    return sample_from_state(n, x, s, ds, res.phi);
  };
  c.sample = [at](std::span<const double> x) { return at(x, false); };
  c.path_defect = [at](std::span<const double> x) {
    auto a = at(x, false), b = at(x, true);
    double top = 0, diff = 0;
    for (std::size_t k = 0; k < a.g.size(); ++k) {
      top = std::max(top, std::abs(a.g[k]));
      diff = std::max(diff, std::abs(a.g[k] - b.g[k]));
    }
    return top > 0 ? diff / top : diff;
  };
}

double relative_det(const std::vector<double>& g_upper, std::size_t n);

// Numeric candidate from the transported vector q0, with access to every
// other member of span(basis).
MetricCandidate family_candidate(std::size_t n, std::shared_ptr<LinearTransport> tr, std::vector<std::vector<double>> basis,
                                 std::vector<double> q0, std::vector<double> base, double tol) {
  MetricCandidate c;
  c.n = n;
  c.base_point = base;
  c.solution_dim = basis.size();
  attach_transport(c, tr, q0, base, tol);
  c.member = [n, tr, basis, base, tol](std::span<const double> g_upper) -> std::optional<MetricCandidate> {
    const auto nn = static_cast<Eigen::Index>(n * n);
    const auto r = static_cast<Eigen::Index>(basis.size());
    Eigen::MatrixXd G(nn, r);
    for (Eigen::Index t = 0; t < r; ++t) {
      std::vector<double> gu, mu;
      split_state(n, tr->full_state(base, basis[static_cast<std::size_t>(t)]), gu, mu);
      for (Eigen::Index k = 0; k < nn; ++k) G(k, t) = gu[static_cast<std::size_t>(k)];
    }
    Eigen::Map<const Eigen::VectorXd> target(g_upper.data(), nn);
    const double scale = target.cwiseAbs().maxCoeff();
    if (!(scale > 0)) return std::nullopt;
    const Eigen::VectorXd t = target / scale;
    const Eigen::VectorXd coef = G.completeOrthogonalDecomposition().solve(t);
    if ((G * coef - t).norm() > 1e-8 * std::sqrt(static_cast<double>(nn))) return std::nullopt;
    std::vector<double> q(basis.front().size(), 0.0);
    for (Eigen::Index j = 0; j < r; ++j)
      for (std::size_t i = 0; i < q.size(); ++i) q[i] += coef(j) * basis[static_cast<std::size_t>(j)][i];
    MetricCandidate m;
    m.n = n;
    m.base_point = base;
    m.solution_dim = basis.size();
    attach_transport(m, tr, std::move(q), base, tol);
    return m;
  };
  return c;
}

double relative_det(const std::vector<double>& g_upper, std::size_t n) {
  const auto N = static_cast<Eigen::Index>(n);
  Eigen::Map<const Eigen::MatrixXd> G(g_upper.data(), N, N);
  const double scale = G.cwiseAbs().maxCoeff();
  if (scale == 0) return 0;
  return std::abs(G.determinant()) / std::pow(scale, static_cast<double>(n));
}

// Numeric obstruction rows at x over the full state (g, μ, ρ), grouped by
// stage, negligible rows dropped.
std::vector<std::vector<std::vector<double>>> algebraic_rows_at(const Connection& conn, const NumericEnv& env,
                                                                std::span<const double> x) {
  const std::size_t n = conn.dimension();
  PointEvaluator ev(conn.chart(), env, x, 3);
  JetField jf(ev.layout(), 3);
  auto G = gamma_jets(conn, ev, jf);
  auto cs = curvature_set(jf, G);
  auto DW = covariant_derivative_of(jf, G, cs.weyl);
  auto DY = covariant_derivative_of(jf, G, cs.cotton);
  std::vector<std::vector<std::vector<double>>> out;
  auto take = [&](AlgebraicStage st, const Tensor<Jet>& ob) {
    std::vector<std::vector<double>> rows;
    std::vector<double> norms;
    double top = 0;
    for (const auto& r : algebraic_rows(jf, st, ob, cs.weyl, cs.cotton)) {
      std::vector<double> v(r.size() + 1, 0.0);
      double s = 0;
      for (std::size_t i = 0; i < r.size(); ++i) {
        v[i] = r[i].value();
        s += v[i] * v[i];
      }
      norms.push_back(std::sqrt(s));
      top = std::max(top, norms.back());
      rows.push_back(std::move(v));
    }
    // Rows that vanish identically come out as roundoff; normalizing them
    // later would turn noise into a constraint.
    std::vector<std::vector<double>> kept;
    for (std::size_t i = 0; i < rows.size(); ++i)
      if (norms[i] > kNegligibleRow * top) kept.push_back(std::move(rows[i]));
    out.push_back(std::move(kept));
  };
  take(AlgebraicStage::T, obstruction_T(jf, cs.weyl));
  take(AlgebraicStage::IC1, obstruction_S(jf, cs.cotton, DW));
  take(AlgebraicStage::I2, obstruction_U(jf, cs.schouten, cs.weyl, DY));
  (void)n;
  return out;
}

void normalize_rows(std::vector<std::vector<double>>& rows) {
  for (auto& r : rows) {
    double s = 0;
    for (double v : r) s += v * v;
    s = std::sqrt(s);
    if (s > 0)
      for (double& v : r) v /= s;
  }
}

bool env_covers(const Chart& ch, const NumericEnv& env) {
  return env.functions.size() >= ch.functions().size() && env.parameters.size() >= ch.parameters().size();
}

class Checklist {
 public:
  Checklist(const Connection& conn, const ChecklistOptions& opt) : input_(conn), opt_(opt) {
    n_ = conn.dimension();
    m_ = sym_count(n_);
    N_ = m_ + n_ + 1;
    base_ = opt.base_point ? *opt.base_point : default_base(n_);
    if (base_.size() != n_) throw std::invalid_argument("base point has wrong dimension");
  }

  MetrisabilityReport run();

 private:
  const Connection& input_;
  ChecklistOptions opt_;
  MetrisabilityReport rep_;
  std::size_t n_, m_, N_;
  std::vector<double> base_;
  std::optional<SpecialResult> special_;
  std::optional<CurvaturePackage> pkg_;

  StepRecord& step(std::string name, std::string status) {
    rep_.steps.push_back({std::move(name), std::move(status), {}});
    return rep_.steps.back();
  }
  std::string str(const Expr& e) const { return expr_string(e, input_.chart()); }
  MetrisabilityReport& fail(const std::string& stage, const std::string& witness) {
    rep_.verdict = Verdict::NotMetrisable;
    rep_.failing_stage = stage;
    rep_.witness = witness;
    return rep_;
  }
  MetrisabilityReport& inconclusive(const std::string& reason) {
    rep_.verdict = Verdict::Inconclusive;
    rep_.reason = reason;
    return rep_;
  }

  bool symbolic();  // false: class overflow, fall back
  bool numeric(bool fallback);
  bool finish_exact(const ReducedSystem& rs, const ExprMatrix& Phi);
  bool finish_hybrid(const ReducedSystem& rs);
  void verify_candidate(const Connection& conn);
};

MetrisabilityReport Checklist::run() {
  if (n_ < 3) throw std::invalid_argument("metrisability checklist requires n >= 3");
  special_ = make_special(input_);
  {
    auto& s = step("special", "pass");
    const char* route = special_->route == SpecialResult::Route::AlreadySpecial ? "already special"
                        : special_->route == SpecialResult::Route::Primitive  ? "primitive of 2β"
                                                                               : "trace-free representative";
    s.details.push_back({"route", route});
    std::string a;
    for (std::size_t i = 0; i < n_; ++i) a += (i ? ", " : "") + str(special_->gauge.A(i));
    s.details.push_back({"A", "[" + a + "]"});
  }
  std::size_t gamma_terms = 0;
  for (std::size_t k = 0; k < special_->connection.gamma().size(); ++k) gamma_terms += special_->connection.gamma().flat(k).size();

  if (opt_.backend == Backend::Numeric) {
    rep_.backend_used = Backend::Numeric;
    numeric(false);
    return rep_;
  }
  if (opt_.backend == Backend::Auto && gamma_terms > opt_.symbolic_budget) {
    step("symbolic", "skip").details.push_back({"reason", "connection exceeds the symbolic budget (" +
                                                              std::to_string(gamma_terms) + " terms)"});
    rep_.backend_used = Backend::Numeric;
    numeric(true);
    return rep_;
  }
  rep_.backend_used = Backend::Symbolic;
  const std::size_t mark = rep_.steps.size();
  bool done = false;
  std::string overflow;
  try {
    ScopedDeadline deadline(opt_.symbolic_time_limit);
    pkg_ = decompose(special_->connection);
    std::size_t weyl_terms = 0;
    bool flat = true;
    for (std::size_t k = 0; k < pkg_->weyl.size(); ++k) {
      flat &= pkg_->weyl.flat(k).is_zero();
      weyl_terms += pkg_->weyl.flat(k).size();
    }
    auto& s = step("weyl", "note");
    s.details.push_back({"projectively_flat", flat ? "true" : "false"});
    s.details.push_back({"terms", std::to_string(weyl_terms)});
    if (opt_.backend == Backend::Auto && weyl_terms > 4 * opt_.symbolic_budget)
      throw std::runtime_error("Weyl tensor exceeds the symbolic budget");
    done = symbolic();
  } catch (const std::runtime_error& e) {
    overflow = e.what();
  }
  if (!done) {
    if (opt_.backend == Backend::Symbolic) {
      if (!overflow.empty()) step("symbolic", "fail").details.push_back({"reason", overflow});
      if (rep_.reason.empty()) inconclusive(overflow.empty() ? "symbolic solving left the supported class" : overflow);
    } else {
      rep_.steps.resize(mark);
      rep_.taus.clear();
      rep_.assumptions.clear();
      rep_.critical.clear();
      step("symbolic", "skip").details.push_back({"reason", overflow.empty() ? "left the supported class" : overflow});
      rep_.backend_used = Backend::Numeric;
      rep_.reason.clear();
      rep_.verdict = Verdict::Inconclusive;
      numeric(true);
    }
  }
  return rep_;
}

bool Checklist::symbolic() {
  const Chart& ch = special_->connection.chart();
  ExprField f(ch);
  const auto& pkg = *pkg_;

  // 1. τ determinants (Weyl is gauge invariant, so the special gauge is used).
  auto T = obstruction_T(f, pkg.weyl);
  {
    auto& s = step("tau", "pass");
    std::string bad;
    for (auto [e, d] : index_pairs(n_)) {
      Expr t = determinant(tau_matrix(f, T, e, d));
      rep_.taus.push_back({{e, d}, t});
      s.details.push_back({"tau_" + pair_label(e, d), str(t)});
      if (!t.is_zero() && bad.empty()) bad = "tau_" + pair_label(e, d) + " = " + str(t);
    }
    if (!bad.empty()) {
      s.status = "fail";
      fail("tau", bad);
      return true;
    }
  }

  // 2-5. Stacked algebraic system.
  auto DW = covariant_derivative(pkg.weyl, pkg.connection);
  auto DY = covariant_derivative(pkg.cotton, pkg.connection);
  const Tensor<Expr> obs[] = {T, obstruction_S(f, pkg.cotton, DW), obstruction_U(f, pkg.schouten, pkg.weyl, DY)};
  const AlgebraicStage stages[] = {AlgebraicStage::T, AlgebraicStage::IC1, AlgebraicStage::I2};
  ExprMatrix rows;
  SymbolicKernel K;
  for (int i = 0; i < 3; ++i) {
    auto more = algebraic_rows(f, stages[i], obs[i], pkg.weyl, pkg.cotton);
    rows.insert(rows.end(), more.begin(), more.end());
    K = symbolic_kernel(rows, m_ + n_);
    append_unique(rep_.assumptions, K.assumptions);
    auto& s = step(stage_name(stages[i]), "pass");
    s.details.push_back({"rows", std::to_string(rows.size())});
    s.details.push_back({"rank", std::to_string(K.rank)});
    s.details.push_back({"kernel_dim", std::to_string(K.basis.size())});
    ExprMatrix V = column_matrix(K.basis, m_ + n_);
    if (K.basis.empty() || forced_degenerate(V, n_)) {
      s.status = "fail";
      rep_.derived_constraints = critical_of(K.assumptions);
      std::string w = K.basis.empty() ? "empty kernel" : "every kernel element has det g = 0";
      for (const auto& c : rep_.derived_constraints) w += "; unless " + str(c) + " = 0";
      fail(stage_name(stages[i]), w);
      return true;
    }
  }
  // Kernel in human-readable form: one line per free unknown.
  auto unknown_name = [&](std::size_t k) -> std::string {
    if (k < m_) {
      auto [a, b] = sym_pair(n_, k);
      return "g^" + std::to_string(a + 1) + std::to_string(b + 1);
    }
    if (k < m_ + n_) return "mu^" + std::to_string(k - m_ + 1);
    return "rho";
  };
  {
    auto& s = step("kernel", "note");
    for (std::size_t j = 0; j < K.basis.size(); ++j) {
      std::string line;
      for (std::size_t k = 0; k < m_ + n_; ++k)
        if (!K.basis[j][k].is_zero()) line += (line.empty() ? "" : ", ") + unknown_name(k) + " = " + str(K.basis[j][k]);
      s.details.push_back({"basis_" + unknown_name(K.free_columns[j]), line});
    }
  }

  // 6-7. Symmetry condition on a one-dimensional g-kernel.
  {
    std::vector<std::size_t> g_dirs;
    for (std::size_t j = 0; j < K.basis.size(); ++j)
      for (std::size_t k = 0; k < m_; ++k)
        if (!K.basis[j][k].is_zero()) {
          g_dirs.push_back(j);
          break;
        }
    auto& s = step("symmetry", "pass");
    if (g_dirs.size() == 1) {
      Tensor<Expr> gu(n_, "uu");
      for (std::size_t k = 0; k < m_; ++k) {
        auto [a, b] = sym_pair(n_, k);
        gu(a, b) = gu(b, a) = K.basis[g_dirs[0]][k];
      }
      auto r = weyl_symmetry_residual(pkg.weyl, gu);
      for (std::size_t k = 0; k < r.size(); ++k)
        if (!r.flat(k).is_zero()) {
          s.status = "fail";
          fail("symmetry", "g_ae g^bc W^e_bcd not symmetric: " + str(r.flat(k)));
          return true;
        }
    } else {
      s.status = "note";
      s.details.push_back({"deferred", "quadratic in a " + std::to_string(g_dirs.size()) +
                                            "-parameter family; checked on the final candidate"});
    }
  }

  // 8-9. Prolongation on the restricted ansatz.
  ExprMatrix V(N_, std::vector<Expr>(K.basis.size() + 1));
  for (std::size_t j = 0; j < K.basis.size(); ++j)
    for (std::size_t k = 0; k < m_ + n_; ++k) V[k][j] = K.basis[j][k];
  V[N_ - 1][K.basis.size()] = Expr(1);
  std::vector<std::size_t> ids = K.free_columns;
  ids.push_back(N_ - 1);
  auto pc = prolongation_connection(pkg);
  auto rs = reduce_prolongation(pc, ch, V, ids);
  std::vector<Expr> fresh;
  for (const auto& a : rs.assumptions)
    if (std::find(rep_.assumptions.begin(), rep_.assumptions.end(), a) == rep_.assumptions.end()) fresh.push_back(a);
  append_unique(rep_.assumptions, rs.assumptions);
  rep_.critical = critical_of(rep_.assumptions);
  {
    auto& s = step("prolongation", "pass");
    s.details.push_back({"iterations", std::to_string(rs.iterations)});
    s.details.push_back({"solution_dim", std::to_string(rs.rank())});
    if (rs.status != ReducedSystem::Status::Flat) {
      s.status = "fail";
      rep_.derived_constraints = critical_of(fresh);
      std::string w = rs.status == ReducedSystem::Status::Empty ? "no nonzero parallel state"
                                                                 : "every parallel state has det g = 0";
      if (!rs.last_constraints.empty()) w += "; constraint " + str(rs.last_constraints.front()) + " = 0";
      for (const auto& c : rep_.derived_constraints) w += "; unless " + str(c) + " = 0";
      fail("prolongation", w);
      return true;
    }
    for (std::size_t a = 0; a < n_; ++a)
      for (std::size_t i = 0; i < rs.rank(); ++i)
        for (std::size_t j = 0; j < rs.rank(); ++j)
          if (!rs.M[a][i][j].is_zero())
            s.details.push_back({"M_" + std::to_string(a + 1) + "[" + unknown_name(rs.identity_rows[i]) + "," +
                                     unknown_name(rs.identity_rows[j]) + "]",
                                 str(rs.M[a][i][j])});
  }
  rep_.critical = critical_of(rep_.assumptions);

  auto Phi = integrate_exact(rs.M, ch);
  if (Phi) {
    if (finish_exact(rs, *Phi)) return true;
  } else {
    step("integrate", "note").details.push_back({"exact", "reduced system is not triangular or has no rational primitive"});
  }
  if (opt_.backend == Backend::Symbolic) {
    inconclusive("no exact nondegenerate solution of the reduced system");
    return true;
  }
  return finish_hybrid(rs);
}

bool Checklist::finish_exact(const ReducedSystem& rs, const ExprMatrix& Phi) {
  const Chart& ch = special_->connection.chart();
  const std::size_t r = rs.rank();
  ExprMatrix S = multiply(rs.V, Phi);  // N x r, columns are parallel states
  auto g_of = [&](const std::vector<Expr>& c) {
    std::vector<Expr> s(N_);
    for (std::size_t i = 0; i < N_; ++i)
      for (std::size_t j = 0; j < r; ++j)
        if (!c[j].is_zero() && !S[i][j].is_zero()) s[i] += S[i][j] * c[j];
    return s;
  };
  auto nondegenerate = [&](const std::vector<Expr>& s) {
    ExprMatrix g(n_, std::vector<Expr>(n_));
    for (std::size_t a = 0; a < n_; ++a)
      for (std::size_t b = 0; b < n_; ++b) g[a][b] = s[sym_index(n_, a, b)];
    return !determinant(g).is_zero();
  };
  std::vector<std::vector<Expr>> tries;
  for (std::size_t j = 0; j < r; ++j) {
    std::vector<Expr> c(r);
    c[j] = Expr(1);
    tries.push_back(c);
  }
  {
    std::vector<Expr> c(r);
    for (std::size_t j = 0; j < r; ++j) {
      const std::size_t row = rs.identity_rows[j];
      if (row < m_) {
        auto [a, b] = sym_pair(n_, row);
        if (a == b) c[j] = Expr(1);
      }
    }
    tries.push_back(c);
    tries.push_back(std::vector<Expr>(r, Expr(1)));
  }
  std::mt19937 rng(opt_.seed);
  std::uniform_int_distribution<int> coef(-3, 3);
  for (int t = 0; t < 8; ++t) {
    std::vector<Expr> c(r);
    for (auto& e : c) e = Expr(coef(rng));
    tries.push_back(c);
  }
  std::optional<std::vector<Expr>> state;
  for (const auto& c : tries) {
    if (std::all_of(c.begin(), c.end(), [](const Expr& e) { return e.is_zero(); })) continue;
    auto s = g_of(c);
    if (nondegenerate(s)) {
      state = s;
      break;
    }
  }
  auto& st = step("integrate", "pass");
  st.details.push_back({"exact", "true"});
  if (!state) {
    st.status = "fail";
    fail("prolongation", "no nondegenerate exact parallel state found");
    return true;
  }
  Tensor<Expr> gu(n_, "uu");
  std::vector<Expr> mu(n_);
  for (std::size_t k = 0; k < m_; ++k) {
    auto [a, b] = sym_pair(n_, k);
    gu(a, b) = gu(b, a) = (*state)[k];
    st.details.push_back({"g^" + std::to_string(a + 1) + std::to_string(b + 1), str((*state)[k])});
  }
  for (std::size_t a = 0; a < n_; ++a) {
    mu[a] = (*state)[m_ + a];
    st.details.push_back({"mu^" + std::to_string(a + 1), str(mu[a])});
  }
  st.details.push_back({"rho", str((*state)[N_ - 1])});

  MetricCandidate cand = reconstruct_metric(ch, gu, mu, (*state)[N_ - 1], opt_.env);
  cand.base_point = base_;
  cand.solution_dim = r;
  auto& rec = step("reconstruct", "pass");
  if (cand.gauge) {
    std::string a;
    for (std::size_t i = 0; i < n_; ++i) a += (i ? ", " : "") + str((*cand.gauge)(i));
    rec.details.push_back({"A", "[" + a + "]"});
  }
  rec.details.push_back({"conformal_factor", cand.conformal_factor ? str(*cand.conformal_factor) : "numeric"});
  rep_.candidate = std::move(cand);
  if (rep_.candidate->exact) {
    Metric gh(ch, rep_.candidate->metric);
    auto cls = same_projective_class(input_, levi_civita(gh));
    auto& v = step("verify", cls ? "pass" : "fail");
    v.details.push_back({"mode", "exact"});
    if (!cls) {
      fail("verify", "Levi-Civita connection of the candidate is not projectively equivalent");
      return true;
    }
    rep_.verdict = Verdict::Metrisable;
    rep_.verification_residual = 0;
    return true;
  }
  verify_candidate(input_);
  return true;
}

bool Checklist::finish_hybrid(const ReducedSystem& rs) {
  const Chart& ch = special_->connection.chart();
  if (!env_covers(ch, opt_.env)) {
    inconclusive("numeric integration needs implementations of every function symbol and parameter");
    return true;
  }
  std::shared_ptr<LinearTransport> tr(make_reduced_transport(rs, ch, opt_.env).release());
  const std::size_t r = rs.rank();
  // Pick q0 with nondegenerate g at the base point.
  std::mt19937 rng(opt_.seed);
  std::normal_distribution<double> nd;
  std::vector<double> q0;
  for (int t = 0; t < 16 && q0.empty(); ++t) {
    std::vector<double> q(r, 0.0);
    if (t < static_cast<int>(r)) {
      q[static_cast<std::size_t>(t)] = 1;
    } else {
      for (auto& v : q) v = nd(rng);
    }
    std::vector<double> gu, mu;
    split_state(n_, tr->full_state(base_, q), gu, mu);
    if (relative_det(gu, n_) > 1e-6) q0 = q;
  }
  auto& st = step("integrate", "pass");
  st.details.push_back({"exact", "false"});
  st.details.push_back({"mode", "numeric transport of the reduced system"});
  if (q0.empty()) {
    st.status = "fail";
    inconclusive("no nondegenerate parallel state at the base point");
    return true;
  }
  std::vector<std::vector<double>> basis(r, std::vector<double>(r, 0.0));
  for (std::size_t t = 0; t < r; ++t) basis[t][t] = 1;
  rep_.candidate = family_candidate(n_, tr, std::move(basis), q0, base_, opt_.ode_tol);
  step("reconstruct", "pass").details.push_back({"conformal_factor", "numeric"});
  verify_candidate(input_);
  return true;
}

void Checklist::verify_candidate(const Connection& conn) {
  auto pts = sample_points(n_, base_, opt_.sample_points, opt_.seed + 1);
  double worst = 0, worst_det = 1, defect = 0;
  try {
    for (const auto& x : pts) {
      auto s = rep_.candidate->sample(x);
      worst = std::max(worst, projective_residual(conn, opt_.env, s));
      worst_det = std::min(worst_det, relative_det(s.g, n_));
      if (rep_.candidate->path_defect) defect = std::max(defect, rep_.candidate->path_defect(x));
    }
  } catch (const std::exception& e) {
    step("verify", "fail").details.push_back({"error", e.what()});
    inconclusive(std::string("candidate could not be sampled: ") + e.what());
    return;
  }
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << worst;
  const bool ok = worst <= opt_.verify_tol && defect <= opt_.verify_tol && worst_det > 1e-10;
  auto& v = step("verify", ok ? "pass" : "fail");
  v.details.push_back({"mode", "numeric"});
  v.details.push_back({"points", std::to_string(pts.size())});
  v.details.push_back({"max_residual", os.str()});
  if (rep_.candidate->path_defect) {
    std::ostringstream d;
    d.precision(3);
    d << std::scientific << defect;
    v.details.push_back({"path_defect", d.str()});
  }
  rep_.verification_residual = std::max(worst, defect);
  if (v.status == "pass") {
    rep_.verdict = Verdict::Metrisable;
  } else {
    inconclusive("numeric verification residual above tolerance");
  }
}

bool Checklist::numeric(bool fallback) {
  const Connection& conn = special_->connection;
  const Chart& ch = conn.chart();
  if (!env_covers(ch, opt_.env)) {
    inconclusive("numeric backend needs implementations of every function symbol and parameter");
    return true;
  }
  auto pts = sample_points(n_, base_, std::max<std::size_t>(opt_.sample_points, 3), opt_.seed);

  // τ at sample points.
  {
    auto& s = step("tau", "pass");
    s.details.push_back({"mode", "numeric"});
    std::size_t witnessed = 0;
    double largest = 0;
    for (const auto& x : pts) {
      PointEvaluator ev(ch, opt_.env, x, 2);
      JetField jf(ev.layout(), 2);
      auto G = gamma_jets(conn, ev, jf);
      auto T = obstruction_T(jf, curvature_set(jf, G).weyl);
      bool any = false;
      for (auto [e, d] : index_pairs(n_)) {
        auto M = tau_matrix(jf, T, e, d);
        std::vector<std::vector<double>> v(M.size(), std::vector<double>(M.size()));
        double scale = 0;
        for (std::size_t i = 0; i < M.size(); ++i)
          for (std::size_t j = 0; j < M.size(); ++j) {
            v[i][j] = M[i][j].value();
            scale = std::max(scale, std::abs(v[i][j]));
          }
        const double t = std::abs(det_of(v));
        largest = std::max(largest, t);
        if (t > 1e-6 * std::max(1.0, std::pow(scale, static_cast<double>(M.size())))) any = true;
      }
      witnessed += any;
    }
    std::ostringstream os;
    os << largest;
    s.details.push_back({"max_abs_tau", os.str()});
    if (witnessed >= 3) {
      s.status = "fail";
      fail("tau", "nonzero tau at " + std::to_string(witnessed) + " sample points (max |tau| = " + os.str() + ")");
      return true;
    }
  }

  // Algebraic rows at the base point.
  auto stages = algebraic_rows_at(conn, opt_.env, base_);
  std::vector<std::vector<double>> rows;
  const AlgebraicStage names[] = {AlgebraicStage::T, AlgebraicStage::IC1, AlgebraicStage::I2};
  for (int i = 0; i < 3; ++i) {
    rows.insert(rows.end(), stages[static_cast<std::size_t>(i)].begin(), stages[static_cast<std::size_t>(i)].end());
    auto norm = rows;
    normalize_rows(norm);
    auto K = numeric_kernel(norm, N_, opt_.rank_tol);
    auto& s = step(stage_name(names[i]), "pass");
    s.details.push_back({"mode", "numeric"});
    s.details.push_back({"rank", std::to_string(K.rank)});
    // ρ never enters the algebraic rows; a kernel of dimension 1 is ρ alone.
    if (K.basis.size() <= 1) {
      s.status = "fail";
      if (fallback) {
        inconclusive(std::string("numeric kernel empty at ") + stage_name(names[i]));
      } else {
        fail(stage_name(names[i]), "numeric kernel contains no g component");
      }
      return true;
    }
  }

  // Transport constraints and holonomy.
  std::shared_ptr<LinearTransport> tr(make_numeric_transport(conn, opt_.env).release());
  TransportOptions fwd, rev;
  fwd.tolerance = rev.tolerance = opt_.ode_tol;
  rev.reverse_order = true;
  std::vector<std::vector<double>> all;
  auto add = [&](std::vector<std::vector<double>> r) {
    normalize_rows(r);
    all.insert(all.end(), r.begin(), r.end());
  };
  add(rows);
  try {
    for (const auto& x : pts) {
      auto P1 = transport_matrix(*tr, base_, x, fwd);
      auto P2 = transport_matrix(*tr, base_, x, rev);
      std::vector<std::vector<double>> hol(N_, std::vector<double>(N_));
      for (std::size_t i = 0; i < N_; ++i)
        for (std::size_t j = 0; j < N_; ++j) hol[i][j] = P1[i * N_ + j] - P2[i * N_ + j];
      all.insert(all.end(), hol.begin(), hol.end());
      auto Lx = algebraic_rows_at(conn, opt_.env, x);
      std::vector<std::vector<double>> lp;
      for (const auto& grp : Lx)
        for (const auto& row : grp) {
          std::vector<double> v(N_, 0.0);
          for (std::size_t j = 0; j < N_; ++j)
            for (std::size_t k = 0; k < N_; ++k) v[j] += row[k] * P1[k * N_ + j];
          lp.push_back(std::move(v));
        }
      add(lp);
    }
  } catch (const std::exception& e) {
    inconclusive(std::string("transport failed: ") + e.what());
    return true;
  }
  auto K = numeric_kernel(all, N_, opt_.rank_tol);
  auto& ps = step("prolongation", "pass");
  ps.details.push_back({"mode", "numeric"});
  ps.details.push_back({"solution_dim", std::to_string(K.basis.size())});
  {
    std::ostringstream os;
    os.precision(3);
    os << std::scientific;
    const auto& sv = K.singular_values;
    if (!sv.empty()) os << sv.front() << " .. " << sv.back();
    ps.details.push_back({"singular_values", os.str()});
  }
  if (K.basis.empty()) {
    ps.status = "fail";
    if (fallback) {
      inconclusive("numeric holonomy leaves no parallel state");
    } else {
      fail("prolongation", "numeric holonomy leaves no parallel state");
    }
    return true;
  }
  std::mt19937 rng(opt_.seed);
  std::normal_distribution<double> nd;
  std::vector<double> s0;
  for (int t = 0; t < 16 && s0.empty(); ++t) {
    std::vector<double> s(N_, 0.0);
    if (t < static_cast<int>(K.basis.size())) {
      s = K.basis[static_cast<std::size_t>(t)];
    } else {
      for (const auto& b : K.basis) {
        const double c = nd(rng);
        for (std::size_t i = 0; i < N_; ++i) s[i] += c * b[i];
      }
    }
    std::vector<double> gu, mu;
    split_state(n_, s, gu, mu);
    if (relative_det(gu, n_) > 1e-6) s0 = s;
  }
  if (s0.empty()) {
    ps.status = "fail";
    if (fallback) {
      inconclusive("numeric parallel states are degenerate");
    } else {
      fail("prolongation", "every numeric parallel state has det g = 0");
    }
    return true;
  }
  rep_.candidate = family_candidate(n_, tr, K.basis, s0, base_, opt_.ode_tol);
  step("reconstruct", "pass").details.push_back({"conformal_factor", "numeric"});
  verify_candidate(input_);
  if (fallback && rep_.verdict == Verdict::Metrisable) {
    inconclusive("numeric evidence only (symbolic stage skipped)");
  }
  return true;
}

}  // namespace

std::vector<std::pair<std::pair<std::size_t, std::size_t>, Expr>> endomorphism_determinants(const Connection& conn) {
  ExprField f(conn.chart());
  auto pkg = decompose(conn);
  auto T = obstruction_T(f, pkg.weyl);
  std::vector<std::pair<std::pair<std::size_t, std::size_t>, Expr>> out;
  for (auto [e, d] : index_pairs(conn.dimension())) out.push_back({{e, d}, determinant(tau_matrix(f, T, e, d))});
  return out;
}

std::vector<double> endomorphism_determinants_at(const Connection& conn, const NumericEnv& env, std::span<const double> x) {
  PointEvaluator ev(conn.chart(), env, x, 2);
  JetField jf(ev.layout(), 2);
  auto G = gamma_jets(conn, ev, jf);
  auto cs = curvature_set(jf, G);
  auto T = obstruction_T(jf, cs.weyl);
  std::vector<double> out;
  for (auto [e, d] : index_pairs(conn.dimension())) {
    auto M = tau_matrix(jf, T, e, d);
    std::vector<std::vector<double>> v(M.size(), std::vector<double>(M.size()));
    for (std::size_t i = 0; i < M.size(); ++i)
      for (std::size_t j = 0; j < M.size(); ++j) v[i][j] = M[i][j].value();
    out.push_back(det_of(v));
  }
  return out;
}

MetricCandidate reconstruct_metric(const Chart& chart, const Tensor<Expr>& g_upper, const std::vector<Expr>& mu,
                                   const Expr& rho, const NumericEnv& env) {
  const std::size_t n = chart.dimension();
  MetricCandidate c;
  c.n = n;
  c.g_upper = g_upper;
  c.mu = mu;
  c.rho = rho;
  Tensor<Expr> gl = invert_symmetric(g_upper, "dd");
  std::vector<Expr> A(n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      if (!gl(a, b).is_zero() && !mu[b].is_zero()) A[a] -= gl(a, b) * mu[b];
  ScalarForm Af = ScalarForm::one_form(A);
  if (!exterior_derivative(Af, chart).is_zero()) throw NotClosed();
  c.gauge = Af;
  auto lg = recognize_log_gradient(Af, chart);
  if (lg && lg->conformal_factor) {
    c.conformal_factor = lg->conformal_factor;
    c.exact = true;
    c.metric = gl.map([&](const Expr& e) { return e.is_zero() ? e : e * *lg->conformal_factor; });
    c.sample = exact_sampler(chart, c.metric, env);
    return c;
  }
  // φ by quadrature from the base point: ĝ = e^{2φ} g_ab.
  c.metric = gl;
  auto inner = exact_sampler(chart, gl, env);
  auto base = std::make_shared<std::vector<double>>(default_base(n));
  auto keep = std::make_shared<std::pair<Chart, ScalarForm>>(chart, Af);
  auto envp = std::make_shared<NumericEnv>(env);
  std::vector<CompiledExpr> Ac;
  for (std::size_t a = 0; a < n; ++a) Ac.emplace_back(A[a], keep->first);
  auto Acp = std::make_shared<std::vector<CompiledExpr>>(std::move(Ac));
  c.sample = [inner, base, keep, envp, Acp, n](std::span<const double> x) {
    double phi = line_integral(keep->second, keep->first, *envp, *base, x);
    PointEvaluator ev(keep->first, *envp, x, 0);
    MetricSample s = inner(x);
    const double w = std::exp(2 * phi);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b)
        for (std::size_t k = 0; k < n; ++k) {
          const double Ak = (*Acp)[k].is_zero() ? 0.0 : ev.value((*Acp)[k]);
          auto& d = s.dg[(a * n + b) * n + k];
          d = w * (2 * Ak * s.g[a * n + b] + d);
        }
    for (auto& v : s.g) v *= w;
    return s;
  };
  return c;
}

namespace {

// D = Γ(ĝ) - Γ at a sample and the trace fit A with D ≈ δA + Aδ.
struct SampleDifference {
  std::vector<double> D, A, gamma;
  double scale = 1;
};

SampleDifference sample_difference(const Connection& conn, const NumericEnv& env, const MetricSample& s) {
  const std::size_t n = conn.dimension();
  const auto N = static_cast<Eigen::Index>(n);
  Eigen::Map<const Eigen::MatrixXd> G(s.g.data(), N, N);
  Eigen::MatrixXd Gi = G.inverse();
  PointEvaluator ev(conn.chart(), env, s.x, 0);
  auto dg = [&](std::size_t a, std::size_t b, std::size_t c) { return s.dg[(a * n + b) * n + c]; };
  SampleDifference out;
  out.D.assign(n * n * n, 0.0);
  out.gamma.assign(n * n * n, 0.0);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t c = 0; c < n; ++c) {
        double lc = 0;
        for (std::size_t d = 0; d < n; ++d)
          lc += 0.5 * Gi(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(d)) *
                (dg(d, c, b) + dg(d, b, c) - dg(b, c, d));
        const Expr& e = conn(a, b, c);
        const double g = e.is_zero() ? 0.0 : ev.value(CompiledExpr(e, conn.chart()));
        out.scale = std::max({out.scale, std::abs(lc), std::abs(g)});
        out.D[(a * n + b) * n + c] = lc - g;
        out.gamma[(a * n + b) * n + c] = g;
      }
  out.A.assign(n, 0.0);
  for (std::size_t b = 0; b < n; ++b)
    for (std::size_t a = 0; a < n; ++a) out.A[b] += out.D[(a * n + a) * n + b] / static_cast<double>(n + 1);
  return out;
}

}  // namespace

double projective_residual(const Connection& conn, const NumericEnv& env, const MetricSample& s) {
  const std::size_t n = conn.dimension();
  auto sd = sample_difference(conn, env, s);
  double worst = 0;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t c = 0; c < n; ++c) {
        double v = sd.D[(a * n + b) * n + c];
        if (a == b) v -= sd.A[c];
        if (a == c) v -= sd.A[b];
        worst = std::max(worst, std::abs(v));
      }
  return worst / sd.scale;
}

double compatibility_residual(const Connection& conn, const NumericEnv& env, const MetricSample& s) {
  const std::size_t n = conn.dimension();
  auto sd = sample_difference(conn, env, s);
  auto gh = [&](std::size_t a, std::size_t b, std::size_t c) {
    double v = sd.gamma[(a * n + b) * n + c];
    if (a == b) v += sd.A[c];
    if (a == c) v += sd.A[b];
    return v;
  };
  double worst = 0, scale = 1;
  for (double v : s.dg) scale = std::max(scale, std::abs(v));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t c = 0; c < n; ++c) {
        double v = s.dg[(a * n + b) * n + c];
        for (std::size_t d = 0; d < n; ++d) v -= gh(d, c, a) * s.g[d * n + b] + gh(d, c, b) * s.g[a * n + d];
        worst = std::max(worst, std::abs(v));
      }
  return worst / scale;
}

std::pair<double, double> fit_constant_multiple(const std::vector<MetricSample>& candidate,
                                                const std::vector<std::vector<double>>& reference) {
  double num = 0, den = 0, top = 0;
  for (std::size_t i = 0; i < candidate.size(); ++i)
    for (std::size_t k = 0; k < reference[i].size(); ++k) {
      num += candidate[i].g[k] * reference[i][k];
      den += reference[i][k] * reference[i][k];
      top = std::max(top, std::abs(candidate[i].g[k]));
    }
  const double c = den > 0 ? num / den : 0;
  double worst = 0;
  for (std::size_t i = 0; i < candidate.size(); ++i)
    for (std::size_t k = 0; k < reference[i].size(); ++k)
      worst = std::max(worst, std::abs(candidate[i].g[k] - c * reference[i][k]));
  return {c, top > 0 ? worst / top : worst};
}

std::vector<std::vector<double>> sample_points(std::size_t n, std::span<const double> base, std::size_t count,
                                               unsigned seed, double radius) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-radius, radius);
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < count; ++i) {
    std::vector<double> x(base.begin(), base.end());
    for (std::size_t a = 0; a < n; ++a) x[a] += u(rng);
    out.push_back(std::move(x));
  }
  return out;
}

MetrisabilityReport run_checklist(const Connection& conn, const ChecklistOptions& opt) {
  return Checklist(conn, opt).run();
}

}  // namespace projmetric
