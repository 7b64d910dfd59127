#include <gtest/gtest.h>

#include <sstream>

#include "commands.hpp"

using namespace projmetric;
using namespace projmetric::cli;

namespace {

std::string job_path(const std::string& name) { return std::string(PROJMETRIC_JOBS_DIR) + "/" + name + ".json"; }

Json base_job() {
  return Json::parse(R"({"dimension": 3, "coordinates": ["x", "y", "z"]})");
}

}  // namespace

TEST(JobSpec, RejectsInvalidInput) {
  Json j = base_job();
  EXPECT_THROW(parse_job(j), JobError);  // neither connection nor metric
  j["connection"] = Json::array();
  j["metric"] = Json::array();
  EXPECT_THROW(parse_job(j), JobError);
  j.erase("metric");
  j["dimension"] = 4;
  EXPECT_THROW(parse_job(j), JobError);
  j["dimension"] = 3;
  j["connection"] = Json::parse(R"([{"upper": [1], "lower": [1, 2], "expr": "x +"}])");
  EXPECT_THROW(parse_job(j), JobError);
  j["connection"] = Json::parse(R"([{"upper": [4], "lower": [1, 2], "expr": "x"}])");
  EXPECT_THROW(parse_job(j), JobError);
  j["connection"] = Json::parse(R"([{"upper": [1], "lower": [1, 2], "expr": "q"}])");
  EXPECT_THROW(parse_job(j), JobError);
  j["connection"] = Json::parse(
      R"([{"upper": [1], "lower": [1, 2], "expr": "x"}, {"upper": [1], "lower": [2, 1], "expr": "y"}])");
  EXPECT_THROW(parse_job(j), JobError);
}

TEST(JobSpec, FunctionsAliasesAndDefinitions) {
  Json j = base_job();
  j["parameters"] = Json::parse(R"([{"name": "k", "value": 2.0}])");
  j["functions"] = Json::parse(R"J([
    {"name": "h", "argument": "z", "numeric": "exp(k*z)", "exp_rate": "k"},
    {"name": "hp", "of": "h", "order": 1},
    {"name": "q", "argument": "x", "define": "x^2 + 1"},
    {"name": "qp", "of": "q"}
  ])J");
  j["connection"] = Json::parse(R"([{"upper": [3], "lower": [1, 2], "expr": "hp + qp"}])");
  auto job = parse_job(j);
  const auto& ch = job.chart;
  // h' = k h by the exp rate, q' = 2x from the definition.
  EXPECT_EQ((*job.connection)(2, 0, 1), ch.param("k") * ch.f("h") + Expr(2) * ch.x(0));
  std::vector<double> x{0.0, 0.0, 0.5};
  EXPECT_NEAR(evaluate(ch.f("h"), ch, x, job.env), std::exp(1.0), 1e-14);
}

TEST(JobSpec, DerivativeNamesPrintBack) {
  Json j = base_job();
  j["functions"] = Json::parse(R"([{"name": "h", "argument": "z"}])");
  j["connection"] = Json::parse(R"([{"upper": [3], "lower": [1, 2], "expr": "h"}])");
  auto job = parse_job(j);
  Expr e = job.chart.f("h", 2) / job.chart.f("h");
  const std::string text = job.print(e);
  EXPECT_EQ(text.find('\''), std::string::npos);
  Json back = chart_section(job, {e});
  back["connection"] = Json::parse(R"([{"upper": [3], "lower": [1, 2], "expr": ""}])");
  back["connection"][0]["expr"] = text;
  auto again = parse_job(back);
  EXPECT_EQ((*again.connection)(2, 0, 1), e);
}

TEST(JobSpec, ParameterWithoutValueIsNotEvaluated) {
  Json j = base_job();
  j["parameters"] = Json::parse(R"(["k"])");
  j["connection"] = Json::parse(R"([{"upper": [3], "lower": [1, 2], "expr": "k*x"}])");
  auto job = parse_job(j);
  job.options.backend = Backend::Numeric;
  EXPECT_THROW(cmd_check(job), EvaluationError);
}

TEST(Cli, Example1ExitsAtProlongation) {
  auto r = cmd_check(load_job(job_path("example1")));
  EXPECT_EQ(r.exit, kNotMetrisable);
  EXPECT_EQ(r.json["failing_stage"], "prolongation");
}

TEST(Cli, Example3ExitsAtFirstIntegrability) {
  auto r = cmd_check(load_job(job_path("example3")));
  EXPECT_EQ(r.exit, kNotMetrisable);
  EXPECT_EQ(r.json["failing_stage"], "algebraic_ic1");
  ASSERT_EQ(r.json["derived_constraints"].size(), 1u);
}

TEST(Cli, Example2RecoverVerifyRoundTrip) {
  auto job = load_job(job_path("example2"));
  auto rec = cmd_recover(job);
  ASSERT_EQ(rec.check.exit, kMetrisable);
  ASSERT_FALSE(rec.metric_file.is_null());
  auto metric = parse_job(rec.metric_file);
  ASSERT_TRUE(metric.metric.has_value());
  auto v = cmd_verify(metric, job);
  EXPECT_TRUE(v.pass) << v.json.dump();
  EXPECT_TRUE(v.json["same_projective_class"].get<bool>());
}

TEST(Cli, SampledMetricRoundTrip) {
  auto job = load_job(job_path("example3_proportional"));
  auto rec = cmd_recover(job);
  ASSERT_EQ(rec.check.exit, kMetrisable);
  auto metric = parse_job(rec.metric_file);
  ASSERT_TRUE(metric.has_samples());
  auto v = cmd_verify(metric, job);
  EXPECT_TRUE(v.pass) << v.json.dump();
  EXPECT_LE(v.json["max_projective_residual"].get<double>(), 1e-8);
  // A sample that is not in the class fails.
  metric.metric_samples[0].dg[4] += 0.5;
  EXPECT_FALSE(cmd_verify(metric, job).pass);
}

TEST(Cli, ReportsAreDeterministic) {
  auto job = load_job(job_path("example3_proportional"));
  EXPECT_EQ(cmd_check(job).json.dump(), cmd_check(job).json.dump());
  EXPECT_EQ(cmd_recover(job).metric_file.dump(), cmd_recover(job).metric_file.dump());
}

TEST(Cli, FlatInvariantsAreZero) {
  auto r = cmd_invariants(load_job(job_path("flat")));
  EXPECT_TRUE(r["weyl"].empty());
  EXPECT_TRUE(r["schouten"].empty());
  EXPECT_TRUE(r["cotton"].empty());
  EXPECT_TRUE(r["projectively_flat"].get<bool>());
  for (const auto& i : r["identities"]) EXPECT_TRUE(i["holds"].get<bool>());
}

TEST(Cli, MetricJobInvariants) {
  auto r = cmd_invariants(load_job(job_path("desitter")));
  EXPECT_EQ(r["metric_scalar_curvature"], "-30");
  EXPECT_TRUE(r["metric_weyl_zero"].get<bool>());
  EXPECT_TRUE(r["projectively_flat"].get<bool>());
  for (const auto& i : r["projective_vs_metric"]) EXPECT_TRUE(i["holds"].get<bool>()) << i.dump();
}

TEST(Cli, FlatGeodesicIsStraight) {
  auto csv = cmd_geodesics(load_job(job_path("flat")), {0, 0, 0}, {3, 4, 0}, 2.0, 5);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "s,x,y,z");
  int rows = 0;
  while (std::getline(in, line)) {
    double s, x, y, z;
    char c;
    std::istringstream row(line);
    row >> s >> c >> x >> c >> y >> c >> z;
    EXPECT_NEAR(x, 0.6 * s, 1e-9);
    EXPECT_NEAR(y, 0.8 * s, 1e-9);
    EXPECT_NEAR(z, 0.0, 1e-12);
    ++rows;
  }
  EXPECT_EQ(rows, 5);
}
