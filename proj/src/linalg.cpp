#include "semorder/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "semorder/errors.hpp"

namespace semorder::linalg {

double asymmetry(const Matrix& a) {
  if (a.rows() != a.cols()) return std::numeric_limits<double>::infinity();
  if (a.size() == 0) return 0.0;
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  return (a - a.transpose()).cwiseAbs().maxCoeff() / scale;
}

void require_symmetric(const Matrix& a, double tol, const char* what) {
  if (a.rows() != a.cols()) throw UsageError(std::string(what) + " must be square");
  if (asymmetry(a) > tol) throw UsageError(std::string(what) + " is not symmetric");
}

double min_eigenvalue(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(a, Eigen::EigenvaluesOnly);
  return eig.eigenvalues()(0);
}

namespace {

double pd_floor(const Matrix& a) { return 1e-12 * std::max(a.trace(), 0.0); }

void require_positive_definite(const Eigen::SelfAdjointEigenSolver<Matrix>& eig, const Matrix& a,
                               const char* what) {
  const double lmin = eig.eigenvalues()(0);
  if (!(lmin > pd_floor(a))) {
    throw NumericalError(std::string(what) + " is singular: Lambda_min = " +
                         std::to_string(std::sqrt(std::max(lmin, 0.0))));
  }
}

}  // namespace

Matrix inverse_sqrt(const Matrix& a, const char* what) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(a);
  require_positive_definite(eig, a, what);
  const Vector inv_root = eig.eigenvalues().cwiseSqrt().cwiseInverse();
  return eig.eigenvectors() * inv_root.asDiagonal() * eig.eigenvectors().transpose();
}

GeneralizedExtremes generalized_extremes(const Matrix& a, const Matrix& b, const char* what) {
  Eigen::SelfAdjointEigenSolver<Matrix> beig(b);
  require_positive_definite(beig, b, what);
  // Reduce to a standard problem with B^{-1/2} A B^{-1/2}.
  const Vector inv_root = beig.eigenvalues().cwiseSqrt().cwiseInverse();
  const Matrix w = beig.eigenvectors() * inv_root.asDiagonal();
  Matrix c = w.transpose() * a * w;
  c = 0.5 * (c + c.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> ceig(c);
  GeneralizedExtremes out;
  const Index d = c.rows();
  out.smallest = ceig.eigenvalues()(0);
  out.largest = ceig.eigenvalues()(d - 1);
  out.smallest_vector = w * ceig.eigenvectors().col(0);
  out.largest_vector = w * ceig.eigenvectors().col(d - 1);
  return out;
}

}  // namespace semorder::linalg
