#pragma once

#include "semorder/types.hpp"

namespace semorder {

// Closed-form rate and entropy expressions. Universal constants are set to
// 1; results are meaningful up to those constants.

/// 1 + 8 log(2p) log(2n) K_X^2 M^2 / u^2: sup-norm entropy bound for
/// {f_beta : ||beta||_1 <= M} over n points with |X_ij| <= K_X.
double entropy_bound_l1(double u, double p, double n, double k_x, double budget);

/// M K_X * integral_{1/sqrt n}^{1} sqrt(entropy_bound_l1(u M K_X / 2, ...)) du + M K_X,
/// by adaptive Gauss-Kronrod quadrature at relative tolerance 1e-8.
double j_integral_l1(double p, double n, double k_x, double budget);

struct DeltaN {
  double value = 0.0;
  /// p = 1 makes log p vanish; value is 0 and this is set.
  bool log_p_vanishes = false;
};

/// delta_n = sqrt(K_X^2 (1 + K_0^2) p log p / (n Lambda_min^2)).
DeltaN delta_n(double k_x, double k_0, double p, double n, double lambda_min);

/// sqrt of the smallest eigenvalue of sigma, clamped at 0.
double lambda_min(const Matrix& sigma);

/// Smallest c1 with sum_k ||f_{0,k}||^2 <= c1 ||sum_k f_{0,k}||^2 over the
/// linear span, given the full pN x pN feature moment matrix in blocks of N.
double check_incoherence(const Matrix& moments, int block_size);

/// max_k 1 / (N lambda_min(Sigma_kk)); +infinity when a block is singular
/// (lambda_min <= 1e-12 * trace).
double check_eigenvalue_cond(const Matrix& moments, int block_size);

}  // namespace semorder
