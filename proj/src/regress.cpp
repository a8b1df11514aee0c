#include "semorder/regress.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "semorder/errors.hpp"
#include "semorder/linalg.hpp"

namespace semorder {

namespace {

constexpr double kRankTolerance = 1e-10;
constexpr double kBoundarySlack = 1e-6;

double mean_square(const Vector& v) { return v.size() == 0 ? 0.0 : v.squaredNorm() / static_cast<double>(v.size()); }

void check_shapes(const Matrix& x, const Vector& y) {
  if (y.size() == 0) throw UsageError("regression needs at least one observation");
  if (x.rows() != y.size()) throw UsageError("design rows and response length differ");
}

}  // namespace

std::string to_string(ClassKind kind) { return kind == ClassKind::Span ? "span" : "l1"; }

void ClassSpec::validate() const {
  if (kind == ClassKind::L1 && !(budget > 0.0)) throw UsageError("l1 class needs a positive budget M");
}

double residual_variance(const Matrix& x, const Vector& y, const Vector& beta) {
  if (x.cols() == 0) return mean_square(y);
  return mean_square(y - x * beta);
}

FitResult fit_span(const Matrix& x, const Vector& y) {
  check_shapes(x, y);
  FitResult fit;
  fit.kind = ClassKind::Span;
  if (x.cols() == 0) {
    fit.residual_variance = mean_square(y);
    return fit;
  }
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod;
  cod.setThreshold(kRankTolerance);
  cod.compute(x);
  fit.coefficients = cod.solve(y);
  fit.rank = static_cast<int>(cod.rank());
  fit.degenerate = cod.rank() < x.cols();
  fit.residual_variance = residual_variance(x, y, fit.coefficients);
  return fit;
}

Vector project_l1_ball(const Vector& v, double radius) {
  if (radius < 0.0) throw UsageError("l1 radius must be nonnegative");
  if (v.lpNorm<1>() <= radius) return v;
  if (radius == 0.0) return Vector::Zero(v.size());
  // Sort-based threshold search (Duchi et al. style).
  std::vector<double> mags(v.size());
  for (Index i = 0; i < v.size(); ++i) mags[static_cast<std::size_t>(i)] = std::abs(v(i));
  std::sort(mags.begin(), mags.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t k = 0; k < mags.size(); ++k) {
    cumulative += mags[k];
    const double candidate = (cumulative - radius) / static_cast<double>(k + 1);
    if (k + 1 == mags.size() || mags[k + 1] <= candidate) {
      theta = candidate;
      break;
    }
  }
  Vector out(v.size());
  for (Index i = 0; i < v.size(); ++i) {
    const double shrunk = std::abs(v(i)) - theta;
    out(i) = shrunk > 0.0 ? std::copysign(shrunk, v(i)) : 0.0;
  }
  return out;
}

namespace {

// Certificate on the centred Gram form: grad = 2 (G beta - b).
double gram_certificate(const Matrix& gram, const Vector& b, const Vector& beta, double budget) {
  if (beta.size() == 0) return 0.0;
  const Vector grad = 2.0 * (gram * beta - b);
  const double sup = grad.cwiseAbs().maxCoeff();
  if (beta.lpNorm<1>() < budget - kBoundarySlack) return sup;
  double worst = 0.0;
  for (Index i = 0; i < beta.size(); ++i) {
    if (beta(i) == 0.0) continue;
    worst = std::max(worst, std::abs(grad(i) + sup * (beta(i) > 0.0 ? 1.0 : -1.0)));
  }
  return worst;
}

struct CentredProblem {
  Matrix gram;
  Vector b;
  Vector column_means;  // empty without intercept
  double response_mean = 0.0;
  Matrix features;  // centred when an intercept is profiled out
  Vector response;
};

CentredProblem centre(const Matrix& x, const Vector& y, bool intercept_first) {
  CentredProblem prob;
  const double n = static_cast<double>(x.rows());
  if (intercept_first) {
    if (x.cols() == 0) throw UsageError("intercept_first set on an empty design");
    prob.features = x.rightCols(x.cols() - 1);
    prob.column_means = prob.features.colwise().mean();
    prob.response_mean = y.mean();
    prob.features.rowwise() -= prob.column_means.transpose();
    prob.response = y.array() - prob.response_mean;
  } else {
    prob.features = x;
    prob.response = y;
  }
  prob.gram = prob.features.transpose() * prob.features / n;
  prob.b = prob.features.transpose() * prob.response / n;
  return prob;
}

Vector assemble(const CentredProblem& prob, const Vector& beta, bool intercept_first) {
  if (!intercept_first) return beta;
  Vector full(beta.size() + 1);
  full(0) = prob.response_mean - (beta.size() > 0 ? prob.column_means.dot(beta) : 0.0);
  full.tail(beta.size()) = beta;
  return full;
}

}  // namespace

double l1_certificate(const Matrix& x, const Vector& y, const Vector& beta, double budget, bool intercept_first) {
  check_shapes(x, y);
  const CentredProblem prob = centre(x, y, intercept_first);
  // With a free intercept the objective is minimised over it exactly, so the
  // certificate only involves the budgeted block.
  return gram_certificate(prob.gram, prob.b, intercept_first ? Vector(beta.tail(beta.size() - 1)) : beta, budget);
}

FitResult fit_l1(const Matrix& x, const Vector& y, double budget, const L1Options& options) {
  check_shapes(x, y);
  if (budget < 0.0) throw UsageError("l1 budget must be nonnegative");
  const CentredProblem prob = centre(x, y, options.intercept_first);
  const Index d = prob.gram.rows();

  FitResult fit;
  fit.kind = ClassKind::L1;
  auto finish = [&](const Vector& beta, int iterations) {
    fit.coefficients = assemble(prob, beta, options.intercept_first);
    fit.residual_variance = residual_variance(x, y, fit.coefficients);
    fit.certificate = gram_certificate(prob.gram, prob.b, beta, budget);
    fit.converged = fit.certificate <= options.tol;
    fit.iterations = iterations;
    return fit;
  };

  if (d == 0 || budget == 0.0) return finish(Vector::Zero(d), 0);

  // Unconstrained minimiser first; if it is feasible it is the answer.
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod;
  cod.setThreshold(kRankTolerance);
  cod.compute(prob.features);
  const Vector unconstrained = cod.solve(prob.response);
  fit.rank = static_cast<int>(cod.rank()) + (options.intercept_first ? 1 : 0);
  fit.degenerate = cod.rank() < d;
  if (unconstrained.lpNorm<1>() <= budget) {
    FitResult out = finish(unconstrained, 0);
    if (out.converged) return out;
  }

  Eigen::SelfAdjointEigenSolver<Matrix> eig(prob.gram, Eigen::EigenvaluesOnly);
  double lipschitz = std::max(2.0 * eig.eigenvalues()(d - 1), 1e-300);

  auto objective = [&](const Vector& beta) { return beta.dot(prob.gram * beta) - 2.0 * prob.b.dot(beta); };
  auto gradient = [&](const Vector& beta) -> Vector { return 2.0 * (prob.gram * beta - prob.b); };

  Vector current = project_l1_ball(unconstrained, budget);
  Vector previous = current;
  Vector extrapolated = current;
  double momentum = 1.0;
  int iter = 0;
  for (; iter < options.max_iter; ++iter) {
    const Vector grad = gradient(extrapolated);
    const double base = objective(extrapolated);
    Vector next;
    // Backtracking on the quadratic upper bound.
    for (;;) {
      next = project_l1_ball(extrapolated - grad / lipschitz, budget);
      const Vector step = next - extrapolated;
      const double bound = base + grad.dot(step) + 0.5 * lipschitz * step.squaredNorm();
      if (objective(next) <= bound + 1e-14 * (1.0 + std::abs(base))) break;
      lipschitz *= 2.0;
    }
    previous = current;
    current = next;
    const double next_momentum = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
    // Restart the momentum when it stops pointing downhill.
    if ((extrapolated - current).dot(current - previous) > 0.0) {
      momentum = 1.0;
      extrapolated = current;
    } else {
      extrapolated = current + ((momentum - 1.0) / next_momentum) * (current - previous);
      momentum = next_momentum;
    }
    if (iter % 10 == 9 && gram_certificate(prob.gram, prob.b, current, budget) <= options.tol) {
      ++iter;
      break;
    }
  }
  return finish(current, iter);
}

Projection population_projection(const Matrix& sigma, const Vector& cross) {
  linalg::require_symmetric(sigma, 1e-10, "second-moment matrix");
  if (cross.size() != sigma.rows()) throw UsageError("cross-moment length does not match the moment matrix");
  Projection out;
  const Index d = sigma.rows();
  if (d == 0) return out;
  const Matrix sym = 0.5 * (sigma + sigma.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
  const double largest = eig.eigenvalues()(d - 1);
  const double floor = kRankTolerance * std::max(largest, 0.0);
  out.singular = !(eig.eigenvalues()(0) > floor);
  if (!out.singular) {
    Eigen::LLT<Matrix> llt(sym);
    out.beta = llt.solve(cross);
    return out;
  }
  Vector inv = Vector::Zero(d);
  for (Index i = 0; i < d; ++i)
    if (eig.eigenvalues()(i) > floor && largest > 0.0) inv(i) = 1.0 / eig.eigenvalues()(i);
  out.beta = eig.eigenvectors() * inv.asDiagonal() * (eig.eigenvectors().transpose() * cross);
  return out;
}

namespace {

void check_capacity(const ClassSpec& cls, Index n, std::size_t parents) {
  const auto needed = static_cast<Index>(parents) * cls.dict.size() + 1;
  if (needed > n)
    throw CapacityError("class fit needs |S| * N + 1 = " + std::to_string(needed) + " <= n = " + std::to_string(n));
}

FitResult fit_design(const ClassSpec& cls, const Matrix& design, const Vector& y, std::size_t parents) {
  FitResult fit;
  if (cls.kind == ClassKind::Span) {
    fit = fit_span(design, y);
  } else {
    L1Options options;
    options.intercept_first = cls.intercept;
    fit = fit_l1(design, y, static_cast<double>(parents) * cls.budget, options);
  }
  // Bases that sum to one contain the constant once per block, so the
  // design loses (copies - 1) ranks by construction; only flag beyond that.
  if (design.cols() > 0 && cls.dict.partition_of_unity()) {
    const Index copies = static_cast<Index>(parents) + (cls.intercept ? 1 : 0);
    const Index expected = design.cols() - std::max<Index>(copies - 1, 0);
    fit.degenerate = fit.rank < expected;
  }
  return fit;
}

}  // namespace

FitResult fit_class(const ClassSpec& cls, const Matrix& data, int response, std::span<const int> predictors) {
  cls.validate();
  if (response < 0 || response >= data.cols()) throw UsageError("response column out of range");
  for (int c : predictors)
    if (c == response) throw UsageError("predictor set contains the response column");
  check_capacity(cls, data.rows(), predictors.size());
  const Vector y = data.col(response);
  if (predictors.empty() && !cls.intercept) return fit_design(cls, Matrix(data.rows(), 0), y, 0);
  return fit_design(cls, design_matrix(cls.dict, data, predictors, cls.intercept), y, predictors.size());
}

std::map<std::vector<int>, FitResult> fit_over_subsets(const ClassSpec& cls, const Matrix& data, int response,
                                                       const std::vector<std::vector<int>>& subsets) {
  cls.validate();
  if (response < 0 || response >= data.cols()) throw UsageError("response column out of range");
  const Index n = data.rows();
  const Index width = cls.dict.size();
  std::map<int, Matrix> blocks;
  for (const auto& subset : subsets) {
    check_capacity(cls, n, subset.size());
    for (int c : subset) {
      if (c == response) throw UsageError("subset contains the response column");
      if (c < 0 || c >= data.cols()) throw UsageError("subset column out of range");
      if (!blocks.contains(c)) blocks.emplace(c, design_matrix(cls.dict, Matrix(data.col(c)), false));
    }
  }
  const Vector y = data.col(response);
  std::map<std::vector<int>, FitResult> out;
  for (const auto& subset : subsets) {
    const Index offset = cls.intercept ? 1 : 0;
    Matrix design(n, static_cast<Index>(subset.size()) * width + offset);
    if (cls.intercept) design.col(0).setOnes();
    for (std::size_t j = 0; j < subset.size(); ++j)
      design.middleCols(offset + static_cast<Index>(j) * width, width) = blocks.at(subset[j]);
    out.emplace(subset, fit_design(cls, design, y, subset.size()));
  }
  return out;
}

}  // namespace semorder
