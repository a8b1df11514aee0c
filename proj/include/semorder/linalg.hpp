#pragma once

#include "semorder/types.hpp"

namespace semorder::linalg {

/// Max |A - A^T| entry, relative to max(1, max |A|).
double asymmetry(const Matrix& a);

void require_symmetric(const Matrix& a, double tol, const char* what);

/// Smallest eigenvalue of a symmetric matrix.
double min_eigenvalue(const Matrix& a);

/// Symmetric inverse square root through an eigendecomposition. Eigenvalues
/// at or below 1e-12 * trace raise NumericalError naming `what`.
Matrix inverse_sqrt(const Matrix& a, const char* what);

struct GeneralizedExtremes {
  double smallest = 0.0;
  double largest = 0.0;
  Vector smallest_vector;  ///< B-normalised: v^T B v = 1
  Vector largest_vector;
};

/// Extreme eigenpairs of A v = lambda B v with A symmetric and B symmetric
/// positive definite. Requires B to be positive definite at 1e-12 * trace.
GeneralizedExtremes generalized_extremes(const Matrix& a, const Matrix& b, const char* what);

}  // namespace semorder::linalg
