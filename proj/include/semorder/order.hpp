#pragma once

#include <cstdint>
#include <mutex>
#include <shared_mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "semorder/regress.hpp"
#include "semorder/semgen.hpp"

namespace semorder {

struct ConditionalSigma {
  double value = 0.0;
  bool floored = false;  ///< raised to 1e-12 * mean(x_v^2)
  bool degenerate = false;
};

/// Residual variance of the class fit of column v on the columns in S.
/// Predictors enter the design in ascending column order.
ConditionalSigma conditional_sigma(const DataMatrix& data, int v, std::span<const int> predictors, const ClassSpec& cls);

/// Memo of conditional_sigma keyed by (v, predecessor bitmask). Safe for
/// concurrent use; racing threads may compute the same entry twice but
/// always store identical values.
class SigmaCache {
 public:
  SigmaCache(const DataMatrix& data, const ClassSpec& cls);

  ConditionalSigma get(int v, std::uint64_t mask);
  int p() const { return static_cast<int>(data_.cols()); }

 private:
  const DataMatrix& data_;
  const ClassSpec& cls_;
  std::shared_mutex mutex_;
  std::unordered_map<std::uint64_t, ConditionalSigma> entries_;
};

/// sum_j log sigma-hat_j^2(perm), accumulated left to right from 0.
double score(const DataMatrix& data, const std::vector<int>& perm, const ClassSpec& cls);
double score(SigmaCache& cache, const std::vector<int>& perm);

enum class OrderMethod { Exact, Greedy };
std::string to_string(OrderMethod method);
OrderMethod order_method_from_string(const std::string& name);

struct OrderEstimate {
  std::vector<int> order;
  std::vector<double> sigma_hat;  ///< sigma-hat^2 per position
  double score = 0.0;
  OrderMethod method = OrderMethod::Exact;
  std::vector<int> floored_positions;
  std::vector<int> degenerate_positions;
};

/// Global minimiser of the score by dynamic programming over predecessor
/// sets, O(p 2^p) fits. Exact score ties go to the lexicographically
/// smallest permutation. p <= 18.
OrderEstimate estimate_order_exact(const DataMatrix& data, const ClassSpec& cls, unsigned threads = 1);

/// Forward greedy: each position takes the unused variable with the
/// smallest conditional sigma; ties go to the smallest index.
OrderEstimate estimate_order_greedy(const DataMatrix& data, const ClassSpec& cls);

OrderEstimate estimate_order(const DataMatrix& data, const ClassSpec& cls, OrderMethod method, unsigned threads = 1);

/// Membership in the topological orders of the generating DAG.
bool in_pi0(const std::vector<int>& perm, const SemSpec& spec);

struct ConsistencyRow {
  Index n = 0;
  int reps = 0;
  int recovered = 0;
  double frequency = 0.0;
  double binomial_se = 0.0;
  /// mean of score(pi-hat) - min over topological orders of score
  double mean_score_gap = 0.0;
};

std::vector<ConsistencyRow> consistency_experiment(const SemSpec& spec, const ClassSpec& cls,
                                                   const std::vector<Index>& n_grid, int reps, OrderMethod method,
                                                   std::uint64_t seed, unsigned threads = 1);

}  // namespace semorder
