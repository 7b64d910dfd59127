#pragma once

#include <string>
#include <vector>

#include "projmetric/linalg.hpp"

namespace projmetric {

// Kernel of a homogeneous linear system over the rational-function field.
// basis[k] is a vector over the columns; free_columns[k] carries a 1 in
// basis[k] and 0 in every other basis vector.
struct SymbolicKernel {
  std::size_t columns = 0;
  std::size_t rank = 0;
  std::vector<std::vector<Expr>> basis;
  std::vector<std::size_t> free_columns;
  // Numerators of non-constant pivots; the kernel is valid where they do
  // not vanish.
  std::vector<Expr> assumptions;
};

// Gaussian elimination with pivots chosen by simplicity: constants first,
// then monomials, then the smallest expression.
SymbolicKernel symbolic_kernel(const ExprMatrix& rows, std::size_t columns);

// True when a non-constant pivot numerator is not a monomial (its vanishing
// would change the kernel on a proper subset).
bool is_critical_assumption(const Expr& e);

struct NumericKernel {
  std::size_t columns = 0;
  std::size_t rank = 0;
  std::vector<std::vector<double>> basis;  // orthonormal
  std::vector<double> singular_values;     // descending
};

// SVD rank with threshold rel_tol * largest singular value.
NumericKernel numeric_kernel(const std::vector<std::vector<double>>& rows, std::size_t columns, double rel_tol);

}  // namespace projmetric
