#include "semorder/order.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>

#include "semorder/errors.hpp"
#include "semorder/parallel.hpp"
#include "semorder/rng.hpp"

namespace semorder {

namespace {

constexpr double kFloorFactor = 1e-12;
constexpr int kExactGuard = 18;

std::uint64_t bit(int v) { return std::uint64_t{1} << v; }

std::vector<int> mask_members(std::uint64_t mask, int p) {
  std::vector<int> out;
  for (int k = 0; k < p; ++k)
    if (mask & bit(k)) out.push_back(k);
  return out;
}

void require_permutation(const std::vector<int>& perm, int p) {
  std::vector<int> sorted = perm;
  std::sort(sorted.begin(), sorted.end());
  if (static_cast<int>(perm.size()) != p) throw UsageError("permutation has wrong length");
  for (int i = 0; i < p; ++i)
    if (sorted[static_cast<std::size_t>(i)] != i) throw UsageError("not a permutation of the columns");
}

}  // namespace

ConditionalSigma conditional_sigma(const DataMatrix& data, int v, std::span<const int> predictors, const ClassSpec& cls) {
  std::vector<int> sorted(predictors.begin(), predictors.end());
  std::sort(sorted.begin(), sorted.end());
  const FitResult fit = fit_class(cls, data.values, v, sorted);
  const double second_moment = data.values.col(v).squaredNorm() / static_cast<double>(data.rows());
  const double floor = kFloorFactor * second_moment;
  ConditionalSigma out;
  out.degenerate = fit.degenerate;
  if (fit.residual_variance <= floor) {
    out.floored = true;
    // A constant all-zero column has no scale at all.
    out.value = floor > 0.0 ? floor : std::numeric_limits<double>::min();
  } else {
    out.value = fit.residual_variance;
  }
  return out;
}

SigmaCache::SigmaCache(const DataMatrix& data, const ClassSpec& cls) : data_(data), cls_(cls) {
  if (data.cols() > 63) throw CapacityError("SigmaCache supports at most 63 columns");
}

ConditionalSigma SigmaCache::get(int v, std::uint64_t mask) {
  const std::uint64_t key = (mask << 6) | static_cast<std::uint64_t>(v);
  {
    std::shared_lock lock(mutex_);
    if (auto it = entries_.find(key); it != entries_.end()) return it->second;
  }
  const auto predictors = mask_members(mask, p());
  const ConditionalSigma value = conditional_sigma(data_, v, predictors, cls_);
  std::unique_lock lock(mutex_);
  return entries_.try_emplace(key, value).first->second;
}

double score(SigmaCache& cache, const std::vector<int>& perm) {
  require_permutation(perm, cache.p());
  double total = 0.0;
  std::uint64_t mask = 0;
  for (int v : perm) {
    total += std::log(cache.get(v, mask).value);
    mask |= bit(v);
  }
  return total;
}

double score(const DataMatrix& data, const std::vector<int>& perm, const ClassSpec& cls) {
  require_permutation(perm, static_cast<int>(data.cols()));
  double total = 0.0;
  std::vector<int> prefix;
  for (int v : perm) {
    total += std::log(conditional_sigma(data, v, prefix, cls).value);
    prefix.push_back(v);
  }
  return total;
}

std::string to_string(OrderMethod method) { return method == OrderMethod::Exact ? "exact" : "greedy"; }

OrderMethod order_method_from_string(const std::string& name) {
  if (name == "exact") return OrderMethod::Exact;
  if (name == "greedy") return OrderMethod::Greedy;
  throw UsageError("unknown order method '" + name + "'");
}

namespace {

OrderEstimate finalize(SigmaCache& cache, std::vector<int> order, OrderMethod method) {
  OrderEstimate est;
  est.method = method;
  std::uint64_t mask = 0;
  for (std::size_t j = 0; j < order.size(); ++j) {
    const ConditionalSigma s = cache.get(order[j], mask);
    est.sigma_hat.push_back(s.value);
    est.score += std::log(s.value);
    if (s.floored) est.floored_positions.push_back(static_cast<int>(j));
    if (s.degenerate) est.degenerate_positions.push_back(static_cast<int>(j));
    mask |= bit(order[j]);
  }
  est.order = std::move(order);
  return est;
}

}  // namespace

OrderEstimate estimate_order_exact(const DataMatrix& data, const ClassSpec& cls, unsigned threads) {
  const int p = static_cast<int>(data.cols());
  if (p < 1) throw UsageError("data has no columns");
  if (p > kExactGuard) throw CapacityError("exact order search is limited to p <= 18; use the greedy method");
  SigmaCache cache(data, cls);

  // Fill every (v, predecessor set) entry up front.
  const std::uint64_t full = bit(p) - 1;
  std::vector<std::pair<int, std::uint64_t>> tasks;
  for (int v = 0; v < p; ++v)
    for (std::uint64_t mask = 0; mask <= full; ++mask)
      if (!(mask & bit(v))) tasks.emplace_back(v, mask);
  std::vector<double> log_sigma(static_cast<std::size_t>(p) << p);
  parallel_for(tasks.size(), threads, [&](std::size_t t) {
    const auto [v, mask] = tasks[t];
    log_sigma[mask * static_cast<std::size_t>(p) + static_cast<std::size_t>(v)] = std::log(cache.get(v, mask).value);
  });
  auto term = [&](int v, std::uint64_t mask) { return log_sigma[mask * static_cast<std::size_t>(p) + static_cast<std::size_t>(v)]; };

  // best[S]: minimal left-to-right score over orderings of S used as a
  // prefix; sequence[S]: the lexicographically smallest such ordering.
  std::vector<double> best(static_cast<std::size_t>(full) + 1, std::numeric_limits<double>::infinity());
  std::vector<std::vector<std::uint8_t>> sequence(static_cast<std::size_t>(full) + 1);
  best[0] = 0.0;
  for (std::uint64_t mask = 1; mask <= full; ++mask) {
    double& slot = best[mask];
    auto& seq = sequence[mask];
    for (int v = 0; v < p; ++v) {
      if (!(mask & bit(v))) continue;
      const std::uint64_t rest = mask ^ bit(v);
      const double candidate = best[rest] + term(v, rest);
      if (candidate < slot) {
        slot = candidate;
        seq = sequence[rest];
        seq.push_back(static_cast<std::uint8_t>(v));
      } else if (candidate == slot) {
        std::vector<std::uint8_t> alt = sequence[rest];
        alt.push_back(static_cast<std::uint8_t>(v));
        if (alt < seq) seq = std::move(alt);
      }
    }
  }
  std::vector<int> order(sequence[full].begin(), sequence[full].end());
  return finalize(cache, std::move(order), OrderMethod::Exact);
}

OrderEstimate estimate_order_greedy(const DataMatrix& data, const ClassSpec& cls) {
  const int p = static_cast<int>(data.cols());
  if (p < 1) throw UsageError("data has no columns");
  if (p > data.rows()) throw UsageError("greedy order search needs p <= n");
  SigmaCache cache(data, cls);
  std::vector<int> order;
  std::uint64_t chosen = 0;
  for (int position = 0; position < p; ++position) {
    int pick = -1;
    double pick_value = std::numeric_limits<double>::infinity();
    for (int v = 0; v < p; ++v) {
      if (chosen & bit(v)) continue;
      const double value = std::log(cache.get(v, chosen).value);
      if (value < pick_value) {
        pick = v;
        pick_value = value;
      }
    }
    order.push_back(pick);
    chosen |= bit(pick);
  }
  return finalize(cache, std::move(order), OrderMethod::Greedy);
}

OrderEstimate estimate_order(const DataMatrix& data, const ClassSpec& cls, OrderMethod method, unsigned threads) {
  return method == OrderMethod::Exact ? estimate_order_exact(data, cls, threads) : estimate_order_greedy(data, cls);
}

bool in_pi0(const std::vector<int>& perm, const SemSpec& spec) { return is_topological_order(spec, perm); }

std::vector<ConsistencyRow> consistency_experiment(const SemSpec& spec, const ClassSpec& cls,
                                                   const std::vector<Index>& n_grid, int reps, OrderMethod method,
                                                   std::uint64_t seed, unsigned threads) {
  spec.validate();
  if (reps < 1) throw UsageError("consistency_experiment needs reps >= 1");
  if (method == OrderMethod::Exact && spec.p > kExactGuard) throw CapacityError("p exceeds the exact-search guard");
  const auto topo = topological_orders(spec);

  std::vector<ConsistencyRow> rows;
  for (std::size_t ni = 0; ni < n_grid.size(); ++ni) {
    const Index n = n_grid[ni];
    std::vector<char> hit(static_cast<std::size_t>(reps), 0);
    std::vector<double> gap(static_cast<std::size_t>(reps), 0.0);
    parallel_for(static_cast<std::size_t>(reps), threads, [&](std::size_t r) {
      const DataMatrix data = sample(spec, n, derive_seed(seed, {ni, r}));
      const OrderEstimate est = estimate_order(data, cls, method, 1);
      hit[r] = in_pi0(est.order, spec) ? 1 : 0;
      SigmaCache cache(data, cls);
      double best_topo = std::numeric_limits<double>::infinity();
      for (const auto& perm : topo) best_topo = std::min(best_topo, score(cache, perm));
      gap[r] = est.score - best_topo;
    });
    ConsistencyRow row;
    row.n = n;
    row.reps = reps;
    row.recovered = static_cast<int>(std::count(hit.begin(), hit.end(), 1));
    row.frequency = static_cast<double>(row.recovered) / reps;
    row.binomial_se = std::sqrt(row.frequency * (1.0 - row.frequency) / reps);
    row.mean_score_gap = std::accumulate(gap.begin(), gap.end(), 0.0) / reps;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace semorder
