#include "semorder/misspec.hpp"

#include <algorithm>
#include <cmath>

#include "semorder/bounds.hpp"
#include "semorder/errors.hpp"
#include "semorder/parallel.hpp"
#include "semorder/rng.hpp"

namespace semorder {

namespace {

Matrix features_of(const ClassSpec& cls, const Matrix& coordinates) {
  return design_matrix(cls.dict, coordinates, cls.intercept);
}

void require_span(const ClassSpec& cls, const AdditiveDesign& truth) {
  if (cls.kind != ClassKind::Span) throw UsageError("misspecification experiment supports span classes only");
  if (!truth.has_response()) throw UsageError("misspecification truth needs a response");
}

}  // namespace

MisspecOracle build_misspec_oracle(const AdditiveDesign& truth, const ClassSpec& cls, Index oracle_n,
                                   std::uint64_t seed, unsigned threads) {
  require_span(cls, truth);
  const DesignSample sample = truth.sample(oracle_n, seed, threads);
  const Matrix features = features_of(cls, sample.coordinates);
  const double n = static_cast<double>(oracle_n);
  MisspecOracle oracle;
  oracle.oracle_n = oracle_n;
  oracle.sigma = features.transpose() * features / n;
  oracle.cross = features.transpose() * sample.response / n;
  const Projection proj = population_projection(oracle.sigma, oracle.cross);
  oracle.beta_star = proj.beta;
  oracle.singular = proj.singular;
  oracle.risk_star = (sample.response - features * oracle.beta_star).squaredNorm() / n;
  oracle.lambda_min = lambda_min(oracle.sigma);
  oracle.k_x = std::max(cls.dict.sup_bound(), cls.intercept ? 1.0 : 0.0);
  return oracle;
}

MisspecDraw misspec_draw(const MisspecOracle& oracle, const AdditiveDesign& truth, const ClassSpec& cls, Index n,
                         std::uint64_t seed) {
  require_span(cls, truth);
  const DesignSample sample = truth.sample(n, seed);
  const Matrix features = features_of(cls, sample.coordinates);
  const FitResult fit = fit_span(features, sample.response);
  const Vector diff = fit.coefficients - oracle.beta_star;
  MisspecDraw draw;
  draw.distance = std::sqrt(std::max(0.0, diff.dot(oracle.sigma * diff)));
  draw.excess_risk = std::abs(fit.residual_variance - oracle.risk_star);
  draw.degenerate = fit.degenerate;
  return draw;
}

MisspecReport misspec_experiment(const AdditiveDesign& truth, const ClassSpec& cls, const MisspecConfig& config) {
  require_span(cls, truth);
  if (config.reps < 1) throw UsageError("misspec_experiment needs reps >= 1");
  if (config.n_grid.empty()) throw UsageError("misspec_experiment needs a non-empty n grid");
  MisspecReport report;
  report.oracle = build_misspec_oracle(truth, cls, config.oracle_n, config.seed, config.threads);
  const auto dim = static_cast<double>(report.oracle.sigma.rows());

  std::vector<double> grid_n, grid_mean;
  for (std::size_t i = 0; i < config.n_grid.size(); ++i) {
    const Index n = config.n_grid[i];
    if (n < static_cast<Index>(dim)) throw UsageError("misspec_experiment: n must be at least the class dimension");
    std::vector<MisspecDraw> draws(static_cast<std::size_t>(config.reps));
    parallel_for(draws.size(), config.threads, [&](std::size_t r) {
      draws[r] = misspec_draw(report.oracle, truth, cls, n, derive_seed(config.seed, {i + 1, r}));
    });
    MisspecCell cell;
    cell.n = n;
    cell.reps = config.reps;
    cell.delta_n = delta_n(report.oracle.k_x, config.k_0, dim, static_cast<double>(n), report.oracle.lambda_min).value;
    std::vector<double> dist, excess, ratio;
    for (const auto& d : draws) {
      dist.push_back(d.distance);
      excess.push_back(d.excess_risk);
      ratio.push_back(cell.delta_n > 0.0 ? d.distance / cell.delta_n : std::numeric_limits<double>::quiet_NaN());
      cell.degenerate += d.degenerate ? 1 : 0;
    }
    cell.distance = summarize(dist);
    cell.excess_risk = summarize(excess);
    cell.ratio = summarize(ratio);
    cell.distances = std::move(dist);
    cell.excess_risks = std::move(excess);
    grid_n.push_back(static_cast<double>(n));
    grid_mean.push_back(cell.distance.mean);
    report.cells.push_back(std::move(cell));
  }
  if (grid_n.size() >= 2) report.slope = fit_loglog(grid_n, grid_mean);
  return report;
}

}  // namespace semorder
