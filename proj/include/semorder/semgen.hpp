#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "semorder/edge_function.hpp"
#include "semorder/regress.hpp"
#include "semorder/types.hpp"

namespace semorder {

/// Variables are zero-based in this API; JSON and CSV use x1..xp.
struct Edge {
  int from = 0;
  int to = 0;
  EdgeFunction fn;
};

/// Nonlinear Gaussian structural equations model
///   X_j = sum_{k -> j} f_{k,j}(X_k) + N(0, noise_sd_j^2),
/// generated along `order`.
struct SemSpec {
  int p = 0;
  std::vector<int> order;
  std::vector<Edge> edges;
  std::vector<double> noise_sd;

  /// Throws UsageError naming the first offending edge or field.
  void validate() const;
};

struct DataMatrix {
  Matrix values;  ///< n x p
  std::optional<std::uint64_t> seed;

  Index rows() const { return values.rows(); }
  Index cols() const { return values.cols(); }
};

/// n i.i.d. rows; row i draws from the stream derive_seed(seed, {i}), so the
/// output is identical for every thread count.
DataMatrix sample(const SemSpec& spec, Index n, std::uint64_t seed, unsigned threads = 1);

bool is_topological_order(const SemSpec& spec, const std::vector<int>& perm);

/// All permutations compatible with the edges, in lexicographic order. p <= 10.
std::vector<std::vector<int>> topological_orders(const SemSpec& spec);

struct PopulationSigma {
  std::vector<double> sigma2;  ///< per position of the permutation
  std::vector<bool> degenerate;
};

/// sigma_j^2(perm) from class fits on one oracle sample of size oracle_n
/// (>= 10 p N), drawn with `seed`.
PopulationSigma population_sigma(const SemSpec& spec, const std::vector<int>& perm, const ClassSpec& cls,
                                 Index oracle_n, std::uint64_t seed, unsigned threads = 1);

struct PermutationGap {
  std::vector<int> perm;
  bool topological = false;
  double gap = 0.0;  ///< (1/p) sum_j log(sigma_j(perm) / sigma_j(order))
  std::vector<double> sigma2;
};

struct GapReport {
  /// min over non-topological permutations; +infinity if there are none.
  double xi = 0.0;
  /// Batch-means Monte-Carlo standard error of xi at the minimising
  /// permutation, combined with a 1e-12 numerical-resolution floor.
  double mc_se = 0.0;
  std::vector<int> argmin;
  int batches = 0;
  std::vector<PermutationGap> table;
};

/// Identifiability gap of the spec under the working class, estimated on an
/// oracle sample. Enumerates all p! permutations (p <= 8); sigma fits are
/// memoised per (variable, predecessor set).
GapReport identifiability_gap(const SemSpec& spec, const ClassSpec& cls, Index oracle_n, std::uint64_t seed,
                              unsigned threads = 1, int batches = 10);

}  // namespace semorder
