#include "semorder/empproc.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "semorder/bounds.hpp"
#include "semorder/errors.hpp"
#include "semorder/linalg.hpp"
#include "semorder/rng.hpp"
#include "semorder/stats.hpp"

namespace semorder {

void MomentPair::validate() const {
  linalg::require_symmetric(sample, 1e-10, "sample moment matrix");
  linalg::require_symmetric(population, 1e-10, "population moment matrix");
  if (sample.rows() != population.rows()) throw UsageError("moment matrices differ in size");
}

MomentPair MomentPair::from_features(const Matrix& features, Matrix population) {
  MomentPair mp;
  const double n = static_cast<double>(features.rows());
  mp.sample = features.transpose() * features / n;
  mp.population = std::move(population);
  mp.n = features.rows();
  mp.k_x = features.size() > 0 ? features.cwiseAbs().maxCoeff() : 0.0;
  return mp;
}

EllipsoidSup ellipsoid_sup(const MomentPair& mp) {
  mp.validate();
  const Matrix diff = mp.sample - mp.population;
  const auto ext = linalg::generalized_extremes(diff, mp.population, "population moment matrix");
  EllipsoidSup out;
  if (std::abs(ext.largest) >= std::abs(ext.smallest)) {
    out.value = std::abs(ext.largest);
    out.argmax = ext.largest_vector;
  } else {
    out.value = std::abs(ext.smallest);
    out.argmax = ext.smallest_vector;
  }
  return out;
}

double z_sup_ellipsoid(const MomentPair& mp) { return ellipsoid_sup(mp).value; }

namespace {

class DirectionObjective {
 public:
  DirectionObjective(const Matrix& diff, const Matrix& sigma, double budget)
      : diff_(diff), sigma_(sigma), budget_(budget) {}

  /// Largest t with t u feasible.
  double radial_scale(const Vector& u) const {
    const double l1 = u.lpNorm<1>();
    const double quad = u.dot(sigma_ * u);
    if (l1 == 0.0) return 0.0;
    double scale = budget_ / l1;
    if (quad > 0.0) scale = std::min(scale, 1.0 / std::sqrt(quad));
    return scale;
  }

  /// sign * beta^T D beta at the boundary point along u.
  double signed_value(const Vector& u, double sign) const {
    const double t = radial_scale(u);
    return sign * t * t * u.dot(diff_ * u);
  }

  Vector boundary_point(const Vector& u) const { return radial_scale(u) * u; }
  const Matrix& diff() const { return diff_; }

 private:
  const Matrix& diff_;
  const Matrix& sigma_;
  double budget_;
};

struct LocalResult {
  Vector beta;
  double value = -std::numeric_limits<double>::infinity();
};

LocalResult ascend(const DirectionObjective& obj, Vector u, double sign, int max_iter) {
  LocalResult res;
  res.beta = obj.boundary_point(u);
  res.value = obj.signed_value(res.beta, sign);
  const double scale = std::max(obj.diff().cwiseAbs().maxCoeff(), 1e-300);
  double step = 0.5 / scale;
  for (int iter = 0; iter < max_iter && step > 1e-14 / scale; ++iter) {
    const Vector grad = 2.0 * sign * (obj.diff() * res.beta);
    const Vector trial = obj.boundary_point(res.beta + step * grad);
    const double value = obj.signed_value(trial, sign);
    if (value > res.value + 1e-15 * std::abs(res.value)) {
      res.beta = trial;
      res.value = value;
      step *= 1.5;
    } else {
      step *= 0.5;
    }
  }
  return res;
}

void pattern_polish(const DirectionObjective& obj, LocalResult& res, double sign) {
  const Index d = res.beta.size();
  double h = 0.1 * std::max(res.beta.cwiseAbs().maxCoeff(), 1e-12);
  const double h_min = 1e-10 * std::max(res.beta.cwiseAbs().maxCoeff(), 1e-12);
  // Gains below rounding level would let the search creep along a ridge.
  const auto gain = [&](double value) { return value > res.value + 1e-13 * std::max(1e-300, std::abs(res.value)); };
  for (int sweep = 0; sweep < 2000 && h > h_min; ++sweep) {
    bool improved = false;
    for (Index i = 0; i < d; ++i) {
      for (double dir : {1.0, -1.0}) {
        Vector trial = res.beta;
        trial(i) += dir * h;
        trial = obj.boundary_point(trial);
        const double value = obj.signed_value(trial, sign);
        if (gain(value)) {
          res.beta = trial;
          res.value = value;
          improved = true;
        }
      }
    }
    if (!improved) h *= 0.5;
  }
}

/// Dense grid over directions for d <= 3 (u and -u give the same value).
LocalResult grid_search(const DirectionObjective& obj, Index d) {
  LocalResult best;
  auto consider = [&](const Vector& u) {
    const Vector beta = obj.boundary_point(u);
    const double value = std::abs(beta.dot(obj.diff() * beta));
    if (value > best.value) {
      best.value = value;
      best.beta = beta;
    }
  };
  if (d == 1) {
    consider(Vector::Ones(1));
  } else if (d == 2) {
    constexpr int steps = 31416;  // angular resolution 1e-4
    for (int k = 0; k < steps; ++k) {
      const double theta = std::numbers::pi * k / steps;
      consider(Vector{{std::cos(theta), std::sin(theta)}});
    }
  } else {
    constexpr int polar_steps = 700;
    for (int a = 0; a <= polar_steps; ++a) {
      const double phi = std::numbers::pi * a / polar_steps;
      const int azimuth_steps = std::max(1, static_cast<int>(std::lround(2 * polar_steps * std::sin(phi))));
      for (int b = 0; b < azimuth_steps; ++b) {
        const double theta = std::numbers::pi * b / azimuth_steps;
        consider(Vector{{std::sin(phi) * std::cos(theta), std::sin(phi) * std::sin(theta), std::cos(phi)}});
      }
    }
  }
  return best;
}

}  // namespace

L1Sup z_sup_l1_detailed(const MomentPair& mp, double budget, int restarts, std::uint64_t seed) {
  if (!(budget > 0.0)) throw UsageError("z_sup_l1 needs a positive budget");
  mp.validate();
  const Matrix diff = mp.sample - mp.population;
  const Index d = diff.rows();
  L1Sup out;
  if (d == 0) return out;
  const DirectionObjective obj(diff, mp.population, budget);

  std::vector<Vector> starts;
  for (Index i = 0; i < d; ++i) starts.push_back(Vector::Unit(d, i));
  try {
    const auto ext = linalg::generalized_extremes(diff, mp.population, "population moment matrix");
    starts.push_back(ext.largest_vector);
    starts.push_back(ext.smallest_vector);
  } catch (const NumericalError&) {
    // Singular population moments still admit a finite l1-constrained sup.
  }
  Rng rng(seed);
  for (int r = 0; r < restarts; ++r) {
    Vector u(d);
    for (Index i = 0; i < d; ++i) u(i) = rng.normal();
    starts.push_back(u);
  }
  out.starts = static_cast<int>(starts.size());

  std::vector<std::pair<LocalResult, double>> locals;
  for (const auto& u : starts) {
    for (double sign : {1.0, -1.0}) locals.emplace_back(ascend(obj, u, sign, 400), sign);
  }
  std::sort(locals.begin(), locals.end(), [](const auto& a, const auto& b) { return a.first.value > b.first.value; });
  const std::size_t polish = std::min<std::size_t>(4, locals.size());
  for (std::size_t k = 0; k < polish; ++k) {
    pattern_polish(obj, locals[k].first, locals[k].second);
    locals[k].first = ascend(obj, locals[k].first.beta, locals[k].second, 400);
  }
  const auto best = std::max_element(locals.begin(), locals.end(),
                                     [](const auto& a, const auto& b) { return a.first.value < b.first.value; });
  out.heuristic = std::max(0.0, best->first.value);
  out.value = out.heuristic;
  out.argmax = best->first.beta;

  if (d <= 3) {
    LocalResult grid = grid_search(obj, d);
    const double sign = grid.beta.dot(diff * grid.beta) >= 0.0 ? 1.0 : -1.0;
    out.grid = grid.value;
    grid.value = sign * grid.beta.dot(diff * grid.beta);
    pattern_polish(obj, grid, sign);
    out.grid_agrees = out.heuristic >= out.grid - 1e-3;
    if (grid.value > out.value) {
      out.value = grid.value;
      out.argmax = grid.beta;
    }
  }
  return out;
}

double z_sup_l1(const MomentPair& mp, double budget, int restarts, std::uint64_t seed) {
  return z_sup_l1_detailed(mp, budget, restarts, seed).value;
}

double inner_product_sup(const Matrix& cross_sample, const Matrix& cross_population, const Matrix& sigma_f,
                         const Matrix& sigma_g, double r1, double r2) {
  if (cross_sample.rows() != cross_population.rows() || cross_sample.cols() != cross_population.cols())
    throw UsageError("cross-moment matrices differ in shape");
  if (sigma_f.rows() != cross_sample.rows() || sigma_g.rows() != cross_sample.cols())
    throw UsageError("feature moment matrices do not match the cross-moment shape");
  linalg::require_symmetric(sigma_f, 1e-10, "Sigma_F");
  linalg::require_symmetric(sigma_g, 1e-10, "Sigma_G");
  const Matrix whitened =
      linalg::inverse_sqrt(sigma_f, "Sigma_F") * (cross_sample - cross_population) * linalg::inverse_sqrt(sigma_g, "Sigma_G");
  if (whitened.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(whitened);
  return r1 * r2 * svd.singularValues()(0);
}

double subgauss_product_sup(const Matrix& features, const Vector& y, const Matrix& sigma, const Vector& cross_population) {
  if (features.rows() != y.size() || features.rows() == 0) throw UsageError("features and response differ in length");
  if (features.cols() != sigma.rows() || cross_population.size() != sigma.rows())
    throw UsageError("moment dimensions do not match the features");
  linalg::require_symmetric(sigma, 1e-10, "Sigma");
  const Vector v = features.transpose() * y / static_cast<double>(y.size()) - cross_population;
  return (linalg::inverse_sqrt(sigma, "Sigma") * v).norm();
}

RademacherReport rademacher_diagnostic(const FeatureSampler& sampler, const Matrix& sigma, int reps, std::uint64_t seed) {
  if (reps < 30) throw UsageError("rademacher_diagnostic needs reps >= 30");
  std::vector<double> z(static_cast<std::size_t>(reps));
  std::vector<double> z_eps(z.size());
  std::vector<double> diff(z.size());
  for (int r = 0; r < reps; ++r) {
    const Matrix features = sampler(derive_seed(seed, {static_cast<std::uint64_t>(r), 0}));
    const double n = static_cast<double>(features.rows());
    const MomentPair mp = MomentPair::from_features(features, sigma);
    const auto idx = static_cast<std::size_t>(r);
    z[idx] = z_sup_ellipsoid(mp);

    Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(r), 1}));
    Vector signs(features.rows());
    for (Index i = 0; i < signs.size(); ++i) signs(i) = rng.sign();
    Matrix weighted = features.transpose() * signs.asDiagonal() * features / n;
    weighted = 0.5 * (weighted + weighted.transpose());
    const auto ext = linalg::generalized_extremes(weighted, sigma, "population moment matrix");
    z_eps[idx] = std::max(std::abs(ext.largest), std::abs(ext.smallest));
    diff[idx] = z[idx] - 2.0 * z_eps[idx];
  }
  RademacherReport out;
  out.reps = reps;
  const Summary sz = summarize(z);
  const Summary se = summarize(z_eps);
  const Summary sd = summarize(diff);
  out.z_mean = sz.mean;
  out.z_se = sz.se;
  out.z_eps_mean = se.mean;
  out.z_eps_se = se.se;
  out.combined_se = sd.se;
  return out;
}

}  // namespace semorder
