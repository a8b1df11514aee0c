#pragma once

#include <cstdint>
#include <vector>

#include "semorder/design.hpp"
#include "semorder/regress.hpp"
#include "semorder/stats.hpp"

namespace semorder {

/// Population quantities of a span class under a truth, estimated on one
/// oracle sample drawn with the experiment seed.
struct MisspecOracle {
  Matrix sigma;        ///< feature second moments
  Vector cross;        ///< feature-response cross moments
  Vector beta_star;    ///< coefficients of f*, the L2(P) projection
  double risk_star = 0.0;  ///< ||Y - f*||^2
  double lambda_min = 0.0;
  double k_x = 1.0;
  bool singular = false;
  Index oracle_n = 0;
};

MisspecOracle build_misspec_oracle(const AdditiveDesign& truth, const ClassSpec& cls, Index oracle_n,
                                   std::uint64_t seed, unsigned threads = 1);

struct MisspecDraw {
  double distance = 0.0;     ///< ||f-hat - f*|| under the oracle moments
  double excess_risk = 0.0;  ///< | ||Y - f-hat||_n^2 - ||Y - f*||^2 |
  bool degenerate = false;
};

/// Least squares on a fresh sample of size n drawn with `seed`. A draw with
/// n = oracle_n and the oracle's seed reproduces the oracle sample.
MisspecDraw misspec_draw(const MisspecOracle& oracle, const AdditiveDesign& truth, const ClassSpec& cls, Index n,
                         std::uint64_t seed);

struct MisspecConfig {
  std::vector<Index> n_grid;
  int reps = 50;
  Index oracle_n = 200000;
  std::uint64_t seed = 0;
  /// Sub-Gaussian constant of Y used in delta_n.
  double k_0 = 1.0;
  unsigned threads = 1;
};

struct MisspecCell {
  Index n = 0;
  int reps = 0;
  double delta_n = 0.0;
  Summary distance;
  Summary excess_risk;
  Summary ratio;  ///< distance / delta_n
  int degenerate = 0;
  std::vector<double> distances;  ///< per replication
  std::vector<double> excess_risks;
};

struct MisspecReport {
  std::vector<MisspecCell> cells;
  SlopeFit slope;  ///< log mean distance against log n
  MisspecOracle oracle;
};

/// Replicated least-squares fits over an n grid. Replication r at grid
/// index i uses seed derive_seed(seed, {i + 1, r}).
MisspecReport misspec_experiment(const AdditiveDesign& truth, const ClassSpec& cls, const MisspecConfig& config);

}  // namespace semorder
