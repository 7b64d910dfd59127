#pragma once

#include <string>
#include <vector>

#include "projmetric/curvature.hpp"

namespace projmetric {

// Torsion-free connection in the coordinate coframe of a chart.
class Connection {
 public:
  Connection() = default;
  // gamma has variance "udd"; throws std::invalid_argument unless
  // symmetric in the lower pair.
  Connection(Chart chart, Tensor<Expr> gamma);
  static Connection flat(const Chart& chart);

  const Chart& chart() const { return chart_; }
  std::size_t dimension() const { return chart_.dimension(); }
  const Tensor<Expr>& gamma() const { return gamma_; }
  const Expr& operator()(std::size_t a, std::size_t b, std::size_t c) const { return gamma_(a, b, c); }

  // Γ^c_{bc}.
  std::vector<Expr> trace() const;

 private:
  Chart chart_;
  Tensor<Expr> gamma_;
};

struct GammaEntry {
  std::size_t upper, lower1, lower2;  // 0-based
  Expr value;
};
// Builds a connection from listed entries; the symmetric partner of each
// entry is filled in. Conflicting duplicates throw std::invalid_argument.
Connection make_connection(const Chart& chart, const std::vector<GammaEntry>& entries);

struct CurvaturePackage {
  Connection connection;
  Tensor<Expr> riemann;   // R^a_bcd
  Tensor<Expr> ricci;     // R_ab
  Tensor<Expr> weyl;      // W^a_bcd
  Tensor<Expr> schouten;  // P_ab
  Tensor<Expr> cotton;    // Y_abc
};

Tensor<Expr> curvature(const Connection& conn);

// With cross_check the Cotton tensor is compared against the divergence of
// the Weyl tensor (n > 2); a mismatch throws std::logic_error.
CurvaturePackage decompose(const Connection& conn, bool cross_check = false);

Tensor<Expr> covariant_derivative(const Tensor<Expr>& t, const Connection& conn);

// Weighted 1/k! projector over the given slots.
Tensor<Expr> symmetrize(const Tensor<Expr>& t, const Chart& chart, const std::vector<std::size_t>& slots);
Tensor<Expr> antisymmetrize(const Tensor<Expr>& t, const Chart& chart, const std::vector<std::size_t>& slots);

struct IdentityResidual {
  std::string name;
  std::size_t components = 0;
  std::size_t nonzero = 0;
  Expr witness;  // first nonzero residual component, if any
  bool holds() const { return nonzero == 0; }
};

// Residuals of W^a_[bcd] = 0, ∇_d W^d_abc = (n-2) Y_bca, Y_[abc] = 0,
// ∇_[a P_bc] = 0 and the cubic Cotton identity.
std::vector<IdentityResidual> check_bianchi(const CurvaturePackage& pkg);

// Trace checks W^a_abc = 0, W^a_bac = 0 and recomposition of R from (W, P).
std::vector<IdentityResidual> check_decomposition(const CurvaturePackage& pkg);

IdentityResidual residual_of(const std::string& name, const Tensor<Expr>& t);

}  // namespace projmetric
