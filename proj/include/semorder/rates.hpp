#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "semorder/dictionary.hpp"
#include "semorder/stats.hpp"

namespace semorder {

/// Which uniform-convergence statistic a rate experiment measures.
///  case3, l1_theorem: l1-constrained supremum (budget p * M resp. M)
///  case4, l3_theorem: ellipsoid supremum over the full span
enum class RateCase { Case3, Case4, L1Theorem, L3Theorem };

std::string to_string(RateCase c);
RateCase rate_case_from_string(const std::string& name);

struct RateConfig {
  RateCase rate_case = RateCase::Case4;
  BasisFamily family = BasisFamily::Trigonometric;
  double lower = 0.0;
  double upper = 1.0;
  std::vector<Index> n_grid;
  std::vector<int> p_grid;
  std::vector<int> size_grid;  ///< dictionary sizes N
  double budget = 1.0;         ///< M
  int reps = 50;
  int restarts = 64;           ///< z_sup_l1 random starts
  std::uint64_t seed = 0;
  bool self_test = false;      ///< use Sigma-hat := Sigma
  unsigned threads = 1;
};

struct RateCell {
  Index n = 0;
  int p = 0;
  int dict_size = 0;
  double budget = 0.0;
  std::uint64_t seed = 0;   ///< replication r uses derive_seed(seed, {r})
  int reps = 0;             ///< replications requested
  int reps_used = 0;        ///< after skipping degenerate Sigma-hat
  bool degenerate = false;  ///< at least one replication skipped
  Summary z;
  std::vector<double> values;
};

struct RateSlope {
  int p = 0;
  int dict_size = 0;
  double budget = 0.0;
  SlopeFit fit;
  double theoretical = -0.5;
};

struct RateReport {
  RateCase rate_case = RateCase::Case4;
  std::vector<RateCell> cells;
  std::vector<RateSlope> slopes;
};

/// For every grid cell (n, p, N), draws reps designs with p independent
/// Uniform[lower, upper] coordinates expanded in the dictionary, and
/// evaluates the case's Z statistic against the exact population moments.
/// Slopes of log mean Z against log n are fitted per (p, N, M).
RateReport rate_experiment(const RateConfig& config);

struct TradeoffRow {
  int dict_size = 0;
  double z_mean = 0.0;  ///< estimation term
  double bias = 0.0;    ///< p N^{-1/(2 alpha)}
};

struct TradeoffReport {
  double alpha = 0.5;
  Index n = 0;
  int p = 0;
  std::vector<TradeoffRow> rows;
  /// Smallest N whose bias term no longer exceeds the estimation term; 0 if none.
  int crossing_size = 0;
};

/// Approximation/estimation balance: case4 rate experiment at a single
/// (n, p), sweeping the dictionary size.
TradeoffReport approximation_tradeoff(RateConfig config, double alpha);

}  // namespace semorder
