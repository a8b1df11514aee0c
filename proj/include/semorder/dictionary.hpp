#pragma once

#include <span>
#include <string>
#include <vector>

#include "semorder/types.hpp"

namespace semorder {

enum class BasisFamily {
  PiecewiseConstant,  ///< indicators of N equal bins
  CubicBSpline,       ///< clamped cubic B-splines on equispaced knots, N >= 4
  Trigonometric,      ///< cos(r * pi * t), t the position rescaled to [0, 1]
  Polynomial,         ///< (x / max(|a|, |b|))^r; N = 1 is the linear basis
};

std::string to_string(BasisFamily family);
BasisFamily basis_family_from_string(const std::string& name);

/// A bounded basis family psi_1..psi_N on [a, b].
///
/// Basis indices are zero-based in this API. Inputs outside [a, b] are
/// clamped to the nearest endpoint, so every value is bounded by
/// sup_bound() for all real x.
class Dictionary {
 public:
  Dictionary(BasisFamily family, int size, double lower, double upper);

  BasisFamily family() const { return family_; }
  int size() const { return size_; }
  double lower() const { return lower_; }
  double upper() const { return upper_; }
  /// K_psi, the bound on max_r sup_x |psi_r(x)|.
  double sup_bound() const { return 1.0; }
  /// Basis functions sum to one everywhere (bins, clamped B-splines).
  bool partition_of_unity() const {
    return family_ == BasisFamily::PiecewiseConstant || family_ == BasisFamily::CubicBSpline;
  }

  double eval(int r, double x) const;
  /// Writes psi_0(x) .. psi_{N-1}(x) into out (size N).
  void eval_all(double x, std::span<double> out) const;

  /// Points in (a, b) where some basis function is not smooth (bin edges,
  /// spline knots). Used to split quadrature intervals.
  std::vector<double> breakpoints() const;

  bool operator==(const Dictionary&) const = default;

 private:
  double clamp(double x) const;
  void eval_spline(double x, std::span<double> out) const;

  BasisFamily family_;
  int size_;
  double lower_;
  double upper_;
};

/// Additive design matrix.
///
/// `columns` is n x k (k may be 0). The result has k * N columns, plus a
/// leading all-ones column when `intercept` is set; block j holds
/// psi_0..psi_{N-1} applied to column j.
Matrix design_matrix(const Dictionary& dict, const Matrix& columns, bool intercept);

/// Same, with the input columns picked from `data` by index.
Matrix design_matrix(const Dictionary& dict, const Matrix& data, std::span<const int> columns, bool intercept);

}  // namespace semorder
