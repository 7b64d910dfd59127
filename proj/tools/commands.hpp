#pragma once

#include <string>
#include <vector>

#include "jobspec.hpp"

namespace projmetric::cli {

// Exit codes.
enum : int { kMetrisable = 0, kNotMetrisable = 1, kInconclusive = 2, kInputError = 3, kInternalError = 4 };

int exit_code(Verdict v);

Json cmd_invariants(const JobSpec& job);

struct CheckOutput {
  MetrisabilityReport report;
  Json json;
  int exit = kInconclusive;
};
CheckOutput cmd_check(const JobSpec& job);

struct RecoverOutput {
  CheckOutput check;
  Json metric_file;  // null when no candidate was found
};
// Exact entries when the candidate is exact, otherwise samples of ĝ and ∂ĝ
// at the base point and the job's sample points.
RecoverOutput cmd_recover(const JobSpec& job);

struct VerifyOutput {
  Json json;
  bool pass = false;
};
VerifyOutput cmd_verify(const JobSpec& metric, const JobSpec& job);

// CSV with columns s, x^1, ..., x^n.
std::string cmd_geodesics(const JobSpec& job, const std::vector<double>& x0, const std::vector<double>& v0, double length,
                          std::size_t samples);

}  // namespace projmetric::cli
