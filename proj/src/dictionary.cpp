#include "semorder/dictionary.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "semorder/errors.hpp"

namespace semorder {

std::string to_string(BasisFamily family) {
  switch (family) {
    case BasisFamily::PiecewiseConstant: return "piecewise-constant";
    case BasisFamily::CubicBSpline: return "cubic-b-spline";
    case BasisFamily::Trigonometric: return "trigonometric";
    case BasisFamily::Polynomial: return "polynomial";
  }
  return "unknown";
}

BasisFamily basis_family_from_string(const std::string& name) {
  if (name == "piecewise-constant") return BasisFamily::PiecewiseConstant;
  if (name == "cubic-b-spline") return BasisFamily::CubicBSpline;
  if (name == "trigonometric") return BasisFamily::Trigonometric;
  if (name == "polynomial") return BasisFamily::Polynomial;
  throw UsageError("unknown dictionary family '" + name + "'");
}

Dictionary::Dictionary(BasisFamily family, int size, double lower, double upper)
    : family_(family), size_(size), lower_(lower), upper_(upper) {
  if (size < 1) throw UsageError("dictionary size must be at least 1");
  if (!(lower < upper) || !std::isfinite(lower) || !std::isfinite(upper))
    throw UsageError("dictionary domain must satisfy a < b");
  if (family == BasisFamily::CubicBSpline && size < 4)
    throw UsageError("cubic-b-spline dictionary needs size >= 4");
}

double Dictionary::clamp(double x) const {
  if (std::isnan(x)) return lower_;
  return std::clamp(x, lower_, upper_);
}

double Dictionary::eval(int r, double x) const {
  if (r < 0 || r >= size_)
    throw UsageError("basis index " + std::to_string(r) + " outside [0, " + std::to_string(size_) + ")");
  if (family_ == BasisFamily::CubicBSpline) {
    std::vector<double> all(static_cast<std::size_t>(size_));
    eval_spline(clamp(x), all);
    return all[static_cast<std::size_t>(r)];
  }
  const double xc = clamp(x);
  const double t = (xc - lower_) / (upper_ - lower_);
  switch (family_) {
    case BasisFamily::PiecewiseConstant: {
      const int bin = std::min(static_cast<int>(t * size_), size_ - 1);
      return bin == r ? 1.0 : 0.0;
    }
    case BasisFamily::Trigonometric: return std::cos((r + 1) * std::numbers::pi * t);
    case BasisFamily::Polynomial: {
      const double scale = std::max(std::abs(lower_), std::abs(upper_));
      return std::pow(xc / scale, r + 1);
    }
    case BasisFamily::CubicBSpline: break;
  }
  return 0.0;
}

void Dictionary::eval_all(double x, std::span<double> out) const {
  if (static_cast<int>(out.size()) != size_) throw UsageError("eval_all: output span has wrong size");
  const double xc = clamp(x);
  const double t = (xc - lower_) / (upper_ - lower_);
  switch (family_) {
    case BasisFamily::PiecewiseConstant: {
      std::fill(out.begin(), out.end(), 0.0);
      out[static_cast<std::size_t>(std::min(static_cast<int>(t * size_), size_ - 1))] = 1.0;
      return;
    }
    case BasisFamily::Trigonometric:
      for (int r = 0; r < size_; ++r) out[static_cast<std::size_t>(r)] = std::cos((r + 1) * std::numbers::pi * t);
      return;
    case BasisFamily::Polynomial: {
      const double u = xc / std::max(std::abs(lower_), std::abs(upper_));
      double power = 1.0;
      for (int r = 0; r < size_; ++r) {
        power *= u;
        out[static_cast<std::size_t>(r)] = power;
      }
      return;
    }
    case BasisFamily::CubicBSpline: eval_spline(xc, out); return;
  }
}

// Clamped knot vector: a (x4), a + i h for i = 1..m-1, b (x4), with m = N - 3
// intervals of width h. Cox-de Boor recursion over the active span.
void Dictionary::eval_spline(double x, std::span<double> out) const {
  constexpr int degree = 3;
  const int intervals = size_ - degree;
  const double h = (upper_ - lower_) / intervals;
  auto knot = [&](int i) {
    // Index into the full knot vector t_0 .. t_{N+3}.
    if (i <= degree) return lower_;
    if (i >= size_) return upper_;
    return lower_ + (i - degree) * h;
  };

  int span = static_cast<int>((x - lower_) / h);
  span = std::clamp(span, 0, intervals - 1);
  const int mu = span + degree;  // t_mu <= x < t_{mu+1}

  std::array<double, degree + 1> basis{};
  std::array<double, degree + 1> left{};
  std::array<double, degree + 1> right{};
  basis[0] = 1.0;
  for (int j = 1; j <= degree; ++j) {
    left[j] = x - knot(mu + 1 - j);
    right[j] = knot(mu + j) - x;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const double denom = right[r + 1] + left[j - r];
      const double temp = denom != 0.0 ? basis[r] / denom : 0.0;
      basis[r] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    basis[j] = saved;
  }
  std::fill(out.begin(), out.end(), 0.0);
  for (int r = 0; r <= degree; ++r) out[static_cast<std::size_t>(mu - degree + r)] = basis[r];
}

std::vector<double> Dictionary::breakpoints() const {
  std::vector<double> points;
  int pieces = 1;
  if (family_ == BasisFamily::PiecewiseConstant) pieces = size_;
  if (family_ == BasisFamily::CubicBSpline) pieces = size_ - 3;
  for (int i = 1; i < pieces; ++i) points.push_back(lower_ + (upper_ - lower_) * i / pieces);
  return points;
}

Matrix design_matrix(const Dictionary& dict, const Matrix& columns, bool intercept) {
  const Index k = columns.cols();
  if (k == 0 && !intercept) throw UsageError("design_matrix: no columns and no intercept");
  const Index n = columns.rows();
  const Index width = dict.size();
  const Index offset = intercept ? 1 : 0;
  Matrix x(n, k * width + offset);
  if (intercept) x.col(0).setOnes();
  std::vector<double> values(static_cast<std::size_t>(width));
  for (Index j = 0; j < k; ++j) {
    for (Index i = 0; i < n; ++i) {
      dict.eval_all(columns(i, j), values);
      for (Index r = 0; r < width; ++r) x(i, offset + j * width + r) = values[static_cast<std::size_t>(r)];
    }
  }
  return x;
}

Matrix design_matrix(const Dictionary& dict, const Matrix& data, std::span<const int> columns, bool intercept) {
  Matrix picked(data.rows(), static_cast<Index>(columns.size()));
  for (std::size_t j = 0; j < columns.size(); ++j) {
    const int c = columns[j];
    if (c < 0 || c >= data.cols()) throw UsageError("design_matrix: column index out of range");
    picked.col(static_cast<Index>(j)) = data.col(c);
  }
  return design_matrix(dict, picked, intercept);
}

}  // namespace semorder
