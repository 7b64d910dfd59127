#pragma once

#include <vector>

#include "projmetric/expr.hpp"

namespace projmetric {

// Dense square matrix of expressions, row-major.
using ExprMatrix = std::vector<std::vector<Expr>>;

// Fraction-free Bareiss determinant.
Expr determinant(ExprMatrix m);

// Adjugate / determinant; throws std::domain_error when singular.
ExprMatrix inverse(const ExprMatrix& m);

}  // namespace projmetric
