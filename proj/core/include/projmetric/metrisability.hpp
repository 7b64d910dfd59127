#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "projmetric/forms.hpp"
#include "projmetric/kernel.hpp"
#include "projmetric/projective.hpp"
#include "projmetric/prolongation.hpp"

namespace projmetric {

enum class Backend { Symbolic, Numeric, Auto };
enum class Verdict { Metrisable, NotMetrisable, Inconclusive };

const char* to_string(Backend b);
const char* to_string(Verdict v);

struct ChecklistOptions {
  Backend backend = Backend::Auto;
  double rank_tol = 1e-9;     // relative to the largest singular value
  double ode_tol = 1e-10;
  double verify_tol = 1e-6;
  std::size_t sample_points = 5;
  unsigned seed = 1;
  std::optional<std::vector<double>> base_point;
  NumericEnv env;
  // Auto switches to the numeric backend when the special connection has
  // more terms than this.
  std::size_t symbolic_budget = 400;
  // Wall-clock limit for the exact stages, in seconds.
  double symbolic_time_limit = 20;
};

struct StepRecord {
  std::string name;
  std::string status;  // "pass", "fail", "skip", "note"
  std::vector<std::pair<std::string, std::string>> details;
};

// ĝ_ab and its first derivatives at one point.
struct MetricSample {
  std::vector<double> x;
  std::vector<double> g;   // n x n, row-major
  std::vector<double> dg;  // dg[(a*n + b)*n + c] = ∂_c ĝ_ab
};

struct MetricCandidate {
  std::size_t n = 0;
  bool exact = false;
  // Exact representation.
  Tensor<Expr> metric;  // ĝ_ab
  Tensor<Expr> g_upper;
  std::vector<Expr> mu;
  Expr rho;
  std::optional<ScalarForm> gauge;  // A = -g_ab μ^b dx^a
  std::optional<Expr> conformal_factor;
  // Numeric representation (always available).
  std::vector<double> base_point;
  std::function<MetricSample(std::span<const double>)> sample;
  // Numeric candidates: relative difference of ĝ(x) transported along two
  // different axis orders (path independence).
  std::function<double(std::span<const double>)> path_defect;
  // Dimension of the space of parallel states the candidate was taken from.
  std::size_t solution_dim = 1;
  // Numeric candidates: the member of that space whose g^ab at the base point
  // is proportional to the given n x n matrix; nullopt when no member is.
  std::function<std::optional<MetricCandidate>(std::span<const double>)> member;
};

struct MetrisabilityReport {
  Verdict verdict = Verdict::Inconclusive;
  Backend backend_used = Backend::Symbolic;
  std::string failing_stage;
  std::string witness;
  std::string reason;  // for Inconclusive
  std::vector<StepRecord> steps;
  std::optional<MetricCandidate> candidate;
  std::vector<Expr> assumptions;          // generic non-vanishing conditions used
  std::vector<Expr> critical;             // non-monomial ones
  std::vector<Expr> derived_constraints;  // critical conditions of the failing stage
  std::vector<std::pair<std::pair<std::size_t, std::size_t>, Expr>> taus;
  double verification_residual = 0;
};

// τ_ed = det of κ -> T_[ed] κ on symmetric tensors, for e < d.
std::vector<std::pair<std::pair<std::size_t, std::size_t>, Expr>> endomorphism_determinants(const Connection& conn);
std::vector<double> endomorphism_determinants_at(const Connection& conn, const NumericEnv& env, std::span<const double> x);

// Reconstructs ĝ from an exact solution (g^ab, μ^a) of the prolonged system.
// Throws SingularMetric when det g^ab ≡ 0 and NotClosed when dA ≠ 0.
MetricCandidate reconstruct_metric(const Chart& chart, const Tensor<Expr>& g_upper, const std::vector<Expr>& mu,
                                   const Expr& rho, const NumericEnv& env);

// Largest deviation of Γ(ĝ) - Γ from a pure trace δ^a_b A_c + δ^a_c A_b at a
// sample, relative to max(1, |Γ(ĝ)|).
double projective_residual(const Connection& conn, const NumericEnv& env, const MetricSample& s);

// ∇̂ĝ at a sample, with Γ̂ = Γ + δA + Aδ and A the trace fit of Γ(ĝ) - Γ;
// largest component relative to max(1, |∂ĝ|).
double compatibility_residual(const Connection& conn, const NumericEnv& env, const MetricSample& s);

// c minimizing |ĝ - c g| over the samples, and the relative residual.
std::pair<double, double> fit_constant_multiple(const std::vector<MetricSample>& candidate,
                                                const std::vector<std::vector<double>>& reference);

std::vector<std::vector<double>> sample_points(std::size_t n, std::span<const double> base, std::size_t count,
                                               unsigned seed, double radius = 0.15);

MetrisabilityReport run_checklist(const Connection& conn, const ChecklistOptions& opt = {});

}  // namespace projmetric
