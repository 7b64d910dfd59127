#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "projmetric/projective.hpp"

namespace projmetric::cli {

namespace {

Json residual_json(const IdentityResidual& r, const JobSpec& job) {
  Json j;
  j["name"] = r.name;
  j["holds"] = r.holds();
  j["components"] = r.components;
  j["nonzero"] = r.nonzero;
  if (!r.holds()) j["witness"] = job.print(r.witness);
  return j;
}

Json expr_list(const std::vector<Expr>& es, const JobSpec& job) {
  Json out = Json::array();
  for (const auto& e : es) out.push_back(job.print(e));
  return out;
}

MetricSample exact_sample(const Tensor<Expr>& g, const Chart& ch, const NumericEnv& env, std::span<const double> x) {
  const std::size_t n = ch.dimension();
  MetricSample s;
  s.x.assign(x.begin(), x.end());
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) s.g.push_back(evaluate(g(a, b), ch, x, env));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t c = 0; c < n; ++c) s.dg.push_back(evaluate(ch.differentiate(g(a, b), c), ch, x, env));
  return s;
}

Json sample_json(const MetricSample& s) {
  Json j;
  j["x"] = s.x;
  j["g"] = s.g;
  j["dg"] = s.dg;
  return j;
}

std::vector<double> base_point_of(const JobSpec& job) {
  if (job.options.base_point) return *job.options.base_point;
  static const double defaults[] = {0.31, 0.47, 0.73, 0.89, 0.57, 0.41, 0.67, 0.23};
  std::vector<double> x;
  for (std::size_t a = 0; a < job.chart.dimension(); ++a) x.push_back(defaults[a % 8] + 0.1 * static_cast<double>(a / 8));
  return x;
}

bool same_chart(const Chart& a, const Chart& b) {
  if (a.coordinate_names() != b.coordinate_names() || a.parameters() != b.parameters()) return false;
  if (a.functions().size() != b.functions().size()) return false;
  for (std::size_t i = 0; i < a.functions().size(); ++i)
    if (a.functions()[i].name != b.functions()[i].name || a.functions()[i].arg != b.functions()[i].arg) return false;
  return true;
}

}  // namespace

int exit_code(Verdict v) {
  switch (v) {
    case Verdict::Metrisable:
      return kMetrisable;
    case Verdict::NotMetrisable:
      return kNotMetrisable;
    default:
      return kInconclusive;
  }
}

Json cmd_invariants(const JobSpec& job) {
  if (job.has_samples()) throw JobError("invariants needs a connection or an exact metric");
  const Connection conn = job.working_connection();
  auto pkg = decompose(conn);
  Json out;
  out["connection"] = tensor_entries(conn.gamma(), job, std::pair<std::size_t, std::size_t>{1, 2});
  out["weyl"] = tensor_entries(pkg.weyl, job);
  out["schouten"] = tensor_entries(pkg.schouten, job);
  out["cotton"] = tensor_entries(pkg.cotton, job);
  Json ids = Json::array();
  for (const auto& r : check_bianchi(pkg)) ids.push_back(residual_json(r, job));
  for (const auto& r : check_decomposition(pkg)) ids.push_back(residual_json(r, job));
  out["identities"] = ids;
  out["special"] = is_special(conn);
  out["projectively_flat"] = is_projectively_flat(pkg);
  if (job.metric && job.chart.dimension() >= 3) {
    Json pm = Json::array();
    for (const auto& r : projective_vs_metric_report(*job.metric)) pm.push_back(residual_json(r, job));
    pm.push_back(residual_json(metric_compatibility(*job.metric, conn), job));
    out["projective_vs_metric"] = pm;
    auto md = metric_decomposition(*job.metric);
    out["metric_scalar_curvature"] = job.print(md.scalar);
    out["metric_weyl_zero"] = residual_of("metric_weyl", md.weyl).holds();
  }
  return out;
}

CheckOutput cmd_check(const JobSpec& job) {
  if (job.has_samples()) throw JobError("check needs a connection or an exact metric");
  CheckOutput out;
  out.report = run_checklist(job.working_connection(), job.options);
  const auto& r = out.report;
  out.exit = exit_code(r.verdict);
  Json& j = out.json;
  j["verdict"] = to_string(r.verdict);
  j["exit_code"] = out.exit;
  j["backend_used"] = to_string(r.backend_used);
  if (!r.failing_stage.empty()) j["failing_stage"] = r.failing_stage;
  if (!r.witness.empty()) j["witness"] = r.witness;
  if (!r.reason.empty()) j["reason"] = r.reason;
  Json steps = Json::array();
  for (const auto& s : r.steps) {
    Json sj;
    sj["name"] = s.name;
    sj["status"] = s.status;
    Json d = Json::object();
    for (const auto& [k, v] : s.details) d[k] = v;
    sj["details"] = d;
    steps.push_back(std::move(sj));
  }
  j["steps"] = steps;
  Json taus = Json::object();
  for (const auto& [ed, t] : r.taus) taus["tau_" + std::to_string(ed.first + 1) + std::to_string(ed.second + 1)] = job.print(t);
  j["taus"] = taus;
  j["assumptions"] = expr_list(r.assumptions, job);
  j["critical"] = expr_list(r.critical, job);
  j["derived_constraints"] = expr_list(r.derived_constraints, job);
  if (r.candidate) {
    const auto& c = *r.candidate;
    Json cj;
    cj["exact"] = c.exact;
    cj["base_point"] = c.base_point;
    cj["solution_dim"] = c.solution_dim;
    if (c.exact) {
      cj["metric"] = tensor_entries(c.metric, job, std::pair<std::size_t, std::size_t>{0, 1});
      if (c.gauge) {
        std::vector<Expr> A;
        for (std::size_t a = 0; a < c.n; ++a) A.push_back((*c.gauge)(a));
        cj["gauge"] = expr_list(A, job);
      }
      if (c.conformal_factor) cj["conformal_factor"] = job.print(*c.conformal_factor);
    }
    cj["verification_residual"] = r.verification_residual;
    j["candidate"] = cj;
  }
  return out;
}

RecoverOutput cmd_recover(const JobSpec& job) {
  RecoverOutput out;
  out.check = cmd_check(job);
  const auto& r = out.check.report;
  if (!r.candidate) return out;
  const auto& c = *r.candidate;
  std::vector<Expr> used;
  if (c.exact)
    for (std::size_t k = 0; k < c.metric.size(); ++k) used.push_back(c.metric.flat(k));
  Json f = chart_section(job, used);
  if (c.exact) {
    f["metric"] = tensor_entries(c.metric, job, std::pair<std::size_t, std::size_t>{0, 1});
    if (c.conformal_factor) f["conformal_factor"] = job.print(*c.conformal_factor);
  } else {
    Json samples = Json::array();
    samples.push_back(sample_json(c.sample(c.base_point)));
    for (const auto& x : sample_points(c.n, c.base_point, job.options.sample_points, job.options.seed))
      samples.push_back(sample_json(c.sample(x)));
    f["metric_samples"] = samples;
  }
  f["verdict"] = to_string(r.verdict);
  out.metric_file = f;
  return out;
}

VerifyOutput cmd_verify(const JobSpec& metric, const JobSpec& job) {
  if (!same_chart(metric.chart, job.chart)) throw JobError("metric file and job use different coordinates or symbols");
  if (metric.connection) throw JobError("metric file holds a connection");
  const Connection conn = job.working_connection();
  const double tol = job.options.verify_tol;
  VerifyOutput out;
  Json& j = out.json;
  std::vector<MetricSample> samples;
  bool exact_ok = true;
  if (metric.metric) {
    j["mode"] = "exact";
    const Connection lc = levi_civita(*metric.metric);
    auto gauge = same_projective_class(conn, lc);
    j["same_projective_class"] = gauge.has_value();
    exact_ok = gauge.has_value();
    if (gauge) {
      std::vector<Expr> A;
      for (std::size_t a = 0; a < job.chart.dimension(); ++a) A.push_back(gauge->A(a));
      j["gauge"] = expr_list(A, job);
    }
    j["metric_compatibility"] = residual_json(metric_compatibility(*metric.metric, lc), job);
    const auto base = base_point_of(job);
    try {
      samples.push_back(exact_sample(metric.metric->lower(), job.chart, job.env, base));
      for (const auto& x : sample_points(job.chart.dimension(), base, job.options.sample_points, job.options.seed))
        samples.push_back(exact_sample(metric.metric->lower(), job.chart, job.env, x));
    } catch (const EvaluationError& e) {
      j["numeric_note"] = std::string("numeric residuals skipped: ") + e.what();
      samples.clear();
    }
  } else {
    j["mode"] = "samples";
    samples = metric.metric_samples;
  }
  double proj = 0, comp = 0;
  for (const auto& s : samples) {
    proj = std::max(proj, projective_residual(conn, job.env, s));
    comp = std::max(comp, compatibility_residual(conn, job.env, s));
  }
  j["points"] = samples.size();
  j["max_projective_residual"] = proj;
  j["max_compatibility_residual"] = comp;
  j["tolerance"] = tol;
  out.pass = exact_ok && proj <= tol && comp <= tol && (metric.metric || !samples.empty());
  j["pass"] = out.pass;
  return out;
}

std::string cmd_geodesics(const JobSpec& job, const std::vector<double>& x0, const std::vector<double>& v0, double length,
                          std::size_t samples) {
  if (job.has_samples()) throw JobError("geodesics needs a connection or an exact metric");
  const std::size_t n = job.chart.dimension();
  if (x0.size() != n || v0.size() != n) throw JobError("--x0 and --v0 need " + std::to_string(n) + " components");
  if (!(length > 0)) throw JobError("--len must be positive");
  GeodesicOptions opt;
  opt.samples = std::max<std::size_t>(samples, 2);
  opt.tolerance = job.options.ode_tol;
  auto trace = integrate_geodesic(job.working_connection(), job.env, x0, v0, length, opt);
  std::ostringstream os;
  os.precision(12);
  os << "s";
  for (const auto& c : job.chart.coordinate_names()) os << "," << c;
  os << "\n";
  for (const auto& p : trace) {
    os << p.s;
    for (double v : p.x) os << "," << v;
    os << "\n";
  }
  return os.str();
}

}  // namespace projmetric::cli
