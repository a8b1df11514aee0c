#pragma once

#include <cstdint>
#include <functional>

#include "semorder/types.hpp"

namespace semorder {

/// Empirical and population second-moment matrices of a feature vector.
struct MomentPair {
  Matrix sample;      ///< Sigma-hat = Psi^T Psi / n
  Matrix population;  ///< Sigma = E psi psi^T
  Index n = 0;
  int p = 0;
  int dict_size = 0;
  double k_x = 1.0;

  void validate() const;
  static MomentPair from_features(const Matrix& features, Matrix population);
};

struct EllipsoidSup {
  double value = 0.0;
  Vector argmax;  ///< beta with beta^T Sigma beta = 1 attaining the value
};

/// sup over beta^T Sigma beta <= 1 of |beta^T (Sigma-hat - Sigma) beta|,
/// the largest absolute generalised eigenvalue.
EllipsoidSup ellipsoid_sup(const MomentPair& mp);
double z_sup_ellipsoid(const MomentPair& mp);

struct L1Sup {
  double value = 0.0;     ///< best feasible value found (a lower bound on the supremum)
  Vector argmax;          ///< feasible beta attaining `value`
  double heuristic = 0.0; ///< value reached by the multi-start ascent alone
  double grid = -1.0;     ///< dense-grid value for d <= 3, else -1
  bool grid_agrees = true;
  int starts = 0;
};

/// Lower bound on sup over ||beta||_1 <= M and beta^T Sigma beta <= 1 of
/// |beta^T (Sigma-hat - Sigma) beta|.
///
/// The objective is 2-homogeneous, so the supremum sits on the boundary of
/// the feasible set; the search runs over directions u with the radial
/// scale min(M / ||u||_1, 1 / ||u||_Sigma). Starts are the coordinate axes,
/// the extreme generalised eigenvectors and `restarts` random directions;
/// each gets gradient ascent with radial retraction, the best few are
/// polished by a coordinate pattern search. For d <= 3 a dense grid over
/// directions is also evaluated.
L1Sup z_sup_l1_detailed(const MomentPair& mp, double budget, int restarts = 64, std::uint64_t seed = 0);
double z_sup_l1(const MomentPair& mp, double budget, int restarts = 64, std::uint64_t seed = 0);

/// sup over ||f|| <= R1, ||g|| <= R2 of |(P_n - P) f g| for linear f, g:
/// R1 R2 sigma_max(Sigma_F^{-1/2} (C-hat - C) Sigma_G^{-1/2}).
double inner_product_sup(const Matrix& cross_sample, const Matrix& cross_population, const Matrix& sigma_f,
                         const Matrix& sigma_g, double r1, double r2);

/// sup over ||f_beta|| <= 1 of |(P_n - P) Y f_beta| = ||Sigma^{-1/2} (Psi^T y / n - m)||.
double subgauss_product_sup(const Matrix& features, const Vector& y, const Matrix& sigma, const Vector& cross_population);

struct RademacherReport {
  double z_mean = 0.0;
  double z_se = 0.0;
  double z_eps_mean = 0.0;
  double z_eps_se = 0.0;
  /// Standard error of the per-replication difference Z - 2 Z^eps.
  double combined_se = 0.0;
  int reps = 0;
};

/// Draws a feature matrix for replication seed s.
using FeatureSampler = std::function<Matrix(std::uint64_t)>;

/// Monte-Carlo check of E Z <= 2 E Z^eps for the squared-norm process over
/// the unit Sigma-ellipsoid. Each replication samples features, takes Z
/// from z_sup_ellipsoid and Z^eps as the largest absolute generalised
/// eigenvalue of (Psi^T diag(eps) Psi / n, Sigma). Needs reps >= 30.
RademacherReport rademacher_diagnostic(const FeatureSampler& sampler, const Matrix& sigma, int reps, std::uint64_t seed);

}  // namespace semorder
