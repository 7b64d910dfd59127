#pragma once

#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "projmetric/connection.hpp"

namespace projmetric {

class SingularMetric : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Symmetric, nondegenerate covariant 2-tensor on a chart.
class Metric {
 public:
  Metric() = default;
  // Throws std::invalid_argument unless symmetric, SingularMetric if det g ≡ 0.
  Metric(Chart chart, Tensor<Expr> g, std::optional<std::pair<int, int>> signature = std::nullopt);

  const Chart& chart() const { return chart_; }
  std::size_t dimension() const { return chart_.dimension(); }
  const Tensor<Expr>& lower() const { return g_; }
  const Tensor<Expr>& upper() const { return ginv_; }
  const Expr& det() const { return det_; }
  const std::optional<std::pair<int, int>>& signature() const { return sig_; }

 private:
  Chart chart_;
  Tensor<Expr> g_, ginv_;
  Expr det_;
  std::optional<std::pair<int, int>> sig_;
};

// Inverse of a symmetric rank-2 tensor by adjugate; throws SingularMetric.
Tensor<Expr> invert_symmetric(const Tensor<Expr>& g, const std::string& variance);

Connection levi_civita(const Metric& g);

// ∇_c g_ab for the given connection.
IdentityResidual metric_compatibility(const Metric& g, const Connection& conn);

struct MetricDecomposition {
  Tensor<Expr> riemann;   // R^a_bcd
  Tensor<Expr> ricci;     // R_ab
  Expr scalar;            // g^ab R_ab
  Tensor<Expr> schouten;  // (R_ab - R g_ab / (2(n-1))) / (n-2)
  Tensor<Expr> weyl;      // metric Weyl C^a_bcd
  Tensor<Expr> einstein;  // R_ab - R g_ab / 2
};

// Requires n >= 3.
MetricDecomposition metric_decomposition(const Metric& g);

// g_ae g^bc W^e_bcd - g_de g^bc W^e_bca, from the inverse form g^ab.
Tensor<Expr> weyl_symmetry_residual(const Tensor<Expr>& W, const Tensor<Expr>& g_upper);

// Residuals that vanish identically for every metric: P̂ - Ric/(n-1),
// P̂ - P + G/((n-1)(n-2)), the Weyl relation, the Weyl symmetry condition
// and (n-1) g_ae g^bc Ŵ^e_bcd + n R_ad - R g_ad.
std::vector<IdentityResidual> projective_vs_metric_report(const Metric& g);

// M_abcd^ef R_ef; zero iff projective and metric Weyl tensors agree.
Tensor<Expr> weyl_equality_residual(const Metric& g);

// η_ab dx^a dx^b / (η(X, x))^2 with η = diag(+1 x p, -1 x q) on x1..xn.
Metric desitter_metric(std::size_t p, std::size_t q, const std::vector<Rat>& X);

}  // namespace projmetric
