#include "semorder/bounds.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>

#include "semorder/errors.hpp"
#include "semorder/linalg.hpp"

namespace semorder {

double entropy_bound_l1(double u, double p, double n, double k_x, double budget) {
  if (!(u > 0.0)) throw UsageError("entropy_bound_l1 needs u > 0");
  const double scaled = u / budget;
  return 1.0 + 8.0 * std::log(2.0 * p) * std::log(2.0 * n) * k_x * k_x / (scaled * scaled);
}

double j_integral_l1(double p, double n, double k_x, double budget) {
  if (n < 2.0) throw UsageError("j_integral_l1 needs n >= 2");
  const double envelope = budget * k_x;
  if (envelope == 0.0) return 0.0;
  auto integrand = [&](double u) { return std::sqrt(entropy_bound_l1(u * envelope / 2.0, p, n, k_x, budget)); };
  double error = 0.0;
  const double integral = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      integrand, 1.0 / std::sqrt(n), 1.0, 30, 1e-8, &error);
  return envelope * integral + envelope;
}

DeltaN delta_n(double k_x, double k_0, double p, double n, double lambda_min) {
  if (lambda_min == 0.0) throw NumericalError("delta_n: Lambda_min = 0");
  if (!(k_x > 0.0) || !(k_0 > 0.0) || !(p >= 1.0) || !(n > 0.0) || !(lambda_min > 0.0))
    throw UsageError("delta_n: inputs must be positive");
  DeltaN out;
  if (p == 1.0) {
    out.log_p_vanishes = true;
    return out;
  }
  const double squared = k_x * k_x * (1.0 + k_0 * k_0) * p * std::log(p) / (n * lambda_min * lambda_min);
  out.value = std::sqrt(squared);
  return out;
}

double lambda_min(const Matrix& sigma) {
  linalg::require_symmetric(sigma, 1e-10, "moment matrix");
  return std::sqrt(std::max(linalg::min_eigenvalue(0.5 * (sigma + sigma.transpose())), 0.0));
}

namespace {
int block_count(const Matrix& moments, int block_size) {
  if (block_size < 1) throw UsageError("block size must be positive");
  if (moments.rows() != moments.cols() || moments.rows() % block_size != 0)
    throw UsageError("moment matrix is not a square grid of blocks");
  return static_cast<int>(moments.rows() / block_size);
}
}  // namespace

double check_incoherence(const Matrix& moments, int block_size) {
  const int p = block_count(moments, block_size);
  linalg::require_symmetric(moments, 1e-10, "block moment matrix");
  Matrix diagonal_sum = Matrix::Zero(block_size, block_size);
  Matrix total_sum = Matrix::Zero(block_size, block_size);
  for (int j = 0; j < p; ++j) {
    for (int k = 0; k < p; ++k) {
      const auto block = moments.block(j * block_size, k * block_size, block_size, block_size);
      total_sum += block;
      if (j == k) diagonal_sum += block;
    }
  }
  diagonal_sum = 0.5 * (diagonal_sum + diagonal_sum.transpose());
  total_sum = 0.5 * (total_sum + total_sum.transpose());
  return linalg::generalized_extremes(diagonal_sum, total_sum, "block sum B").largest;
}

double check_eigenvalue_cond(const Matrix& moments, int block_size) {
  const int p = block_count(moments, block_size);
  double worst = 0.0;
  for (int k = 0; k < p; ++k) {
    const Matrix block = moments.block(k * block_size, k * block_size, block_size, block_size);
    linalg::require_symmetric(block, 1e-10, "diagonal block");
    const double smallest = linalg::min_eigenvalue(0.5 * (block + block.transpose()));
    if (!(smallest > 1e-12 * std::max(block.trace(), 0.0))) return std::numeric_limits<double>::infinity();
    worst = std::max(worst, 1.0 / (block_size * smallest));
  }
  return worst;
}

}  // namespace semorder
