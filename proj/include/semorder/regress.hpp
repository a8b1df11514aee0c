#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "semorder/dictionary.hpp"
#include "semorder/types.hpp"

namespace semorder {

enum class ClassKind { Span, L1 };

std::string to_string(ClassKind kind);

/// Working function class: additive dictionary expansions, either the full
/// linear span or the signed hull with an l1 budget.
struct ClassSpec {
  Dictionary dict;
  ClassKind kind = ClassKind::Span;
  /// Per-block l1 budget M0; a fit on k parent blocks uses k * M0. Ignored for Span.
  double budget = 1.0;
  bool intercept = true;

  void validate() const;
};

struct FitResult {
  /// Layout matches design_matrix: [intercept], block 0 psi_0..psi_{N-1}, block 1, ...
  Vector coefficients;
  double residual_variance = 0.0;
  ClassKind kind = ClassKind::Span;
  bool degenerate = false;  ///< design rank-deficient, minimum-norm solution returned
  int rank = 0;             ///< numerical rank of the design
  bool converged = true;    ///< l1 only: certificate <= tol
  double certificate = 0.0; ///< l1 only: KKT residual
  int iterations = 0;
};

/// Least squares over the column span of x. Rank is decided at
/// 1e-10 * (largest pivot); deficient designs get the minimum-norm solution.
FitResult fit_span(const Matrix& x, const Vector& y);

struct L1Options {
  double tol = 1e-8;
  int max_iter = 50000;
  /// Column 0 of the design is an intercept: free, and outside the budget.
  bool intercept_first = false;
};

/// Euclidean projection onto {b : ||b||_1 <= radius}.
Vector project_l1_ball(const Vector& v, double radius);

/// Least squares subject to ||beta||_1 <= budget (intercept excluded).
///
/// Accelerated projected gradient on the Gram form with exact ball
/// projection and backtracking. The returned certificate is
///   interior  (||beta||_1 < budget - 1e-6):  ||grad||_inf
///   boundary:  max over the support of |grad_i + ||grad||_inf sign(beta_i)|
/// and `converged` is certificate <= tol.
FitResult fit_l1(const Matrix& x, const Vector& y, double budget, const L1Options& options = {});

/// The certificate described at fit_l1, for arbitrary coefficients.
double l1_certificate(const Matrix& x, const Vector& y, const Vector& beta, double budget, bool intercept_first);

/// ||y - x beta||_n^2
double residual_variance(const Matrix& x, const Vector& y, const Vector& beta);

struct Projection {
  Vector beta;
  bool singular = false;
};

/// Solves sigma * beta = cross; minimum-norm when sigma is singular
/// (eigenvalues below 1e-10 * largest). Sigma must be symmetric to 1e-10.
Projection population_projection(const Matrix& sigma, const Vector& cross);

/// Fits column `response` of data on the additive expansion of `predictors`
/// (taken in the given order). Throws CapacityError when
/// |predictors| * N + 1 > n.
FitResult fit_class(const ClassSpec& cls, const Matrix& data, int response, std::span<const int> predictors);

/// One fit per subset. Subsets are used as given (column order matters for
/// the coefficient layout); per-column design blocks are shared.
std::map<std::vector<int>, FitResult> fit_over_subsets(const ClassSpec& cls, const Matrix& data, int response,
                                                       const std::vector<std::vector<int>>& subsets);

}  // namespace semorder
