#pragma once

#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "projmetric/connection.hpp"
#include "projmetric/jet.hpp"
#include "projmetric/kernel.hpp"

namespace projmetric {

class NotSpecial : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Linear system ∂_a s = B_a s on the prolonged state (g^ab, μ^a, ρ).
struct ProlongationConnection {
  std::size_t n = 0;
  std::vector<ExprMatrix> B;  // one N x N matrix per coordinate
  std::size_t state_dim() const { return B.empty() ? 0 : B[0].size(); }
};

// Throws NotSpecial unless P_[ab] = 0.
ProlongationConnection prolongation_connection(const CurvaturePackage& pkg);

ExprMatrix multiply(const ExprMatrix& a, const ExprMatrix& b);
ExprMatrix column_matrix(const std::vector<std::vector<Expr>>& columns, std::size_t rows);

// det of g^ab built from the state columns with one auxiliary symbol per
// column; true when it vanishes identically.
bool forced_degenerate(const ExprMatrix& V, std::size_t n);

// Restriction of the state to s = V p with ∂_a p = M_a p.
struct ReducedSystem {
  enum class Status { Flat, Empty, Degenerate } status = Status::Flat;
  ExprMatrix V;                        // N x r
  std::vector<std::size_t> identity_rows;
  std::vector<ExprMatrix> M;           // r x r per coordinate
  std::vector<Expr> assumptions;
  std::size_t iterations = 0;
  std::vector<Expr> last_constraints;  // constraint rows that emptied or degenerated the ansatz
  std::size_t rank() const { return V.empty() ? 0 : V[0].size(); }
};

// Differentiates the ansatz, adds the resulting algebraic rows and the
// flatness rows of the reduced connection until nothing new appears.
ReducedSystem reduce_prolongation(const ProlongationConnection& pc, const Chart& chart, ExprMatrix V,
                                  std::vector<std::size_t> identity_rows, std::size_t max_iterations = 64);

// Fundamental matrix Φ with ∂_a Φ = M_a Φ, when the M_a are simultaneously
// strictly triangular and every potential has a rational primitive.
std::optional<ExprMatrix> integrate_exact(const std::vector<ExprMatrix>& M, const Chart& chart);

// Pointwise linear transport ∂_a q = M_a(x) q along coordinate lines.
class LinearTransport {
 public:
  virtual ~LinearTransport() = default;
  virtual std::size_t dim() const = 0;
  virtual std::size_t n() const = 0;
  // Row-major dim x dim matrix for direction a at x.
  virtual void matrix(std::span<const double> x, std::size_t a, double* out) = 0;
  // Full prolonged state (g^ab, μ, ρ) from the transported vector.
  virtual std::vector<double> full_state(std::span<const double> x, std::span<const double> q) = 0;
  // ∂_a of the full state along the solution through (x, q).
  virtual std::vector<double> full_state_derivative(std::span<const double> x, std::span<const double> q, std::size_t a) = 0;
};

// Full state, coefficients from jets of Γ (order 2) at each point.
std::unique_ptr<LinearTransport> make_numeric_transport(const Connection& special, const NumericEnv& env);
// Reduced state q = p of a ReducedSystem.
std::unique_ptr<LinearTransport> make_reduced_transport(const ReducedSystem& rs, const Chart& chart, const NumericEnv& env);

struct TransportOptions {
  double tolerance = 1e-10;
  bool reverse_order = false;  // move coordinates n-1, ..., 0 instead of 0, ..., n-1
  bool track_phi = false;      // integrate dφ = -g_ab μ^b dx^a alongside
};

struct TransportResult {
  std::vector<double> q;
  double phi = 0;
};

class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

TransportResult transport(LinearTransport& tr, std::span<const double> from, std::span<const double> to,
                          std::span<const double> q0, const TransportOptions& opt = {});

// Columns of the transport matrix Π with q(to) = Π q(from), row-major.
std::vector<double> transport_matrix(LinearTransport& tr, std::span<const double> from, std::span<const double> to,
                                     const TransportOptions& opt = {});

// Unpacks g^ab (n x n, row-major) and μ from a full state.
void split_state(std::size_t n, std::span<const double> s, std::vector<double>& g_upper, std::vector<double>& mu);

}  // namespace projmetric
