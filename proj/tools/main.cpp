#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

using namespace projmetric;
using namespace projmetric::cli;

namespace {

struct Overrides {
  std::string backend;
  double tol = 0;
  long seed = -1;
  long points = -1;
};

void apply(const Overrides& o, JobSpec& job) {
  if (!o.backend.empty()) {
    if (o.backend == "symbolic") job.options.backend = Backend::Symbolic;
    else if (o.backend == "numeric") job.options.backend = Backend::Numeric;
    else if (o.backend == "auto") job.options.backend = Backend::Auto;
    else throw JobError("--backend must be symbolic, numeric or auto");
  }
  if (o.tol > 0) job.options.verify_tol = o.tol;
  if (o.seed >= 0) job.options.seed = static_cast<unsigned>(o.seed);
  if (o.points > 0) job.options.sample_points = static_cast<std::size_t>(o.points);
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw JobError("cannot write " + path);
  out << text;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw JobError("bad number '" + item + "' in list");
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Projective structures: invariants, metrisability checks and metric recovery"};
  app.require_subcommand(1);
  Overrides ov;
  std::string report_path;
  app.add_option("--backend", ov.backend, "symbolic, numeric or auto")->check(CLI::IsMember({"symbolic", "numeric", "auto"}));
  app.add_option("--tol", ov.tol, "verification tolerance");
  app.add_option("--seed", ov.seed, "seed for sample points");
  app.add_option("--points", ov.points, "number of sample points");
  app.add_option("--report", report_path, "write the JSON report here instead of stdout");

  std::string job_path, metric_path, out_path, x0, v0;
  double length = 1;
  std::size_t samples = 64;

  auto* inv = app.add_subcommand("invariants", "Weyl, Schouten and Cotton tensors with identity checks");
  inv->add_option("job", job_path)->required();
  auto* chk = app.add_subcommand("check", "run the metrisability checklist");
  chk->add_option("job", job_path)->required();
  auto* rec = app.add_subcommand("recover", "recover a metric in the projective class");
  rec->add_option("job", job_path)->required();
  rec->add_option("-o,--output", out_path, "metric file")->required();
  auto* ver = app.add_subcommand("verify", "check a metric file against a job");
  ver->add_option("metric", metric_path)->required();
  ver->add_option("job", job_path)->required();
  auto* geo = app.add_subcommand("geodesics", "sample an unparametrized geodesic as CSV");
  geo->add_option("job", job_path)->required();
  geo->add_option("--x0", x0, "initial point, comma separated")->required();
  geo->add_option("--v0", v0, "initial direction, comma separated")->required();
  geo->add_option("--len", length, "Euclidean arclength");
  geo->add_option("--samples", samples, "number of samples");
  geo->add_option("-o,--output", out_path, "CSV file (stdout by default)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kInputError;
  }

  try {
    JobSpec job = load_job(job_path);
    apply(ov, job);
    if (inv->parsed()) {
      write_text(report_path, dump(cmd_invariants(job)));
      return 0;
    }
    if (chk->parsed()) {
      auto r = cmd_check(job);
      write_text(report_path, dump(r.json));
      return r.exit;
    }
    if (rec->parsed()) {
      auto r = cmd_recover(job);
      write_text(report_path, dump(r.check.json));
      if (!r.metric_file.is_null()) write_text(out_path, dump(r.metric_file));
      else std::cerr << "no metric recovered: " << to_string(r.check.report.verdict) << "\n";
      return r.check.exit;
    }
    if (ver->parsed()) {
      JobSpec metric = load_job(metric_path);
      auto r = cmd_verify(metric, job);
      write_text(report_path, dump(r.json));
      return r.pass ? 0 : 1;
    }
    if (geo->parsed()) {
      write_text(out_path, cmd_geodesics(job, parse_list(x0), parse_list(v0), length, samples));
      return 0;
    }
  } catch (const JobError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const EvaluationError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInternalError;
  }
  return kInputError;
}
