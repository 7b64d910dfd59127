#pragma once

#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "projmetric/metric.hpp"
#include "projmetric/metrisability.hpp"
#include "projmetric/parser.hpp"

namespace projmetric::cli {

using Json = nlohmann::ordered_json;

// Invalid job input; the CLI maps it to exit code 3.
class JobError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct JobSpec {
  Json source;  // parsed input, kept for re-emission of the chart section
  Chart chart;
  Aliases aliases;
  // Names for derivative symbols f^(k) declared through "of"/"order".
  std::map<std::pair<std::size_t, std::uint32_t>, std::string> derivative_names;
  NumericEnv env;
  std::optional<Connection> connection;
  std::optional<Metric> metric;
  std::vector<MetricSample> metric_samples;
  ChecklistOptions options;

  bool has_samples() const { return !metric_samples.empty(); }
  // The connection to analyse: given directly or the Levi-Civita connection.
  Connection working_connection() const;
  // Symbol names that the expression grammar accepts back.
  std::string print(const Expr& e) const;
};

JobSpec parse_job(const Json& j);
JobSpec load_job(const std::string& path);

// Entries {"upper":[...],"lower":[...],"expr":"..."} with 1-based indices.
// Components equal under the listed symmetric slot pair are emitted once.
Json tensor_entries(const Tensor<Expr>& t, const JobSpec& job, std::optional<std::pair<std::size_t, std::size_t>> symmetric = {});

// Chart section of the job (dimension, coordinates, parameters, functions)
// plus any aliases needed to read derivative names emitted by print().
Json chart_section(const JobSpec& job, const std::vector<Expr>& used);

}  // namespace projmetric::cli
