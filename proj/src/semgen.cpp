#include "semorder/semgen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <unordered_map>

#include "semorder/errors.hpp"
#include "semorder/parallel.hpp"
#include "semorder/rng.hpp"
#include "semorder/stats.hpp"

namespace semorder {

namespace {

std::string edge_label(const Edge& e) { return std::to_string(e.from + 1) + "->" + std::to_string(e.to + 1); }

std::vector<int> sorted_prefix(const std::vector<int>& perm, std::size_t length) {
  std::vector<int> prefix(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(length));
  std::sort(prefix.begin(), prefix.end());
  return prefix;
}

void require_permutation(const std::vector<int>& perm, int p) {
  if (static_cast<int>(perm.size()) != p) throw UsageError("permutation has wrong length");
  std::vector<int> sorted = perm;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < p; ++i)
    if (sorted[static_cast<std::size_t>(i)] != i) throw UsageError("not a permutation of the variables");
}

}  // namespace

void SemSpec::validate() const {
  if (p < 1) throw UsageError("SEM needs p >= 1");
  if (static_cast<int>(noise_sd.size()) != p) throw UsageError("noise_sd must have p entries");
  for (int j = 0; j < p; ++j) {
    const double s = noise_sd[static_cast<std::size_t>(j)];
    if (!(s > 0.0) || !std::isfinite(s)) throw UsageError("noise_sd of x" + std::to_string(j + 1) + " must be positive");
  }
  std::vector<std::vector<int>> children(static_cast<std::size_t>(p));
  for (const auto& e : edges) {
    if (e.from < 0 || e.from >= p || e.to < 0 || e.to >= p)
      throw UsageError("edge " + edge_label(e) + " refers to an unknown variable");
    if (e.from == e.to) throw UsageError("edge " + edge_label(e) + " is a self-loop (cycle)");
    auto& kids = children[static_cast<std::size_t>(e.from)];
    if (std::find(kids.begin(), kids.end(), e.to) != kids.end())
      throw UsageError("edge " + edge_label(e) + " is duplicated");
    kids.push_back(e.to);
  }
  // Kahn's algorithm: whatever is left over lies on a cycle.
  std::vector<int> indegree(static_cast<std::size_t>(p), 0);
  for (const auto& e : edges) ++indegree[static_cast<std::size_t>(e.to)];
  std::vector<int> queue;
  for (int j = 0; j < p; ++j)
    if (indegree[static_cast<std::size_t>(j)] == 0) queue.push_back(j);
  std::size_t seen = 0;
  while (seen < queue.size()) {
    const int v = queue[seen++];
    for (int c : children[static_cast<std::size_t>(v)])
      if (--indegree[static_cast<std::size_t>(c)] == 0) queue.push_back(c);
  }
  if (static_cast<int>(queue.size()) < p) {
    for (const auto& e : edges)
      if (indegree[static_cast<std::size_t>(e.to)] > 0 && indegree[static_cast<std::size_t>(e.from)] > 0)
        throw UsageError("edge " + edge_label(e) + " lies on a cycle");
  }
  if (static_cast<int>(order.size()) != p) throw UsageError("order must list all p variables");
  require_permutation(order, p);
  if (!is_topological_order(*this, order)) {
    std::vector<int> position(static_cast<std::size_t>(p));
    for (int i = 0; i < p; ++i) position[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = i;
    for (const auto& e : edges)
      if (position[static_cast<std::size_t>(e.from)] > position[static_cast<std::size_t>(e.to)])
        throw UsageError("edge " + edge_label(e) + " contradicts the declared order");
  }
}

bool is_topological_order(const SemSpec& spec, const std::vector<int>& perm) {
  if (static_cast<int>(perm.size()) != spec.p) return false;
  std::vector<int> position(static_cast<std::size_t>(spec.p), -1);
  for (int i = 0; i < spec.p; ++i) {
    const int v = perm[static_cast<std::size_t>(i)];
    if (v < 0 || v >= spec.p || position[static_cast<std::size_t>(v)] != -1) return false;
    position[static_cast<std::size_t>(v)] = i;
  }
  return std::all_of(spec.edges.begin(), spec.edges.end(), [&](const Edge& e) {
    return position[static_cast<std::size_t>(e.from)] < position[static_cast<std::size_t>(e.to)];
  });
}

DataMatrix sample(const SemSpec& spec, Index n, std::uint64_t seed, unsigned threads) {
  spec.validate();
  if (n < 1) throw UsageError("sample size must be positive");
  std::vector<std::vector<const Edge*>> incoming(static_cast<std::size_t>(spec.p));
  for (const auto& e : spec.edges) incoming[static_cast<std::size_t>(e.to)].push_back(&e);

  DataMatrix data;
  data.seed = seed;
  data.values.resize(n, spec.p);
  parallel_for(static_cast<std::size_t>(n), threads, [&](std::size_t i) {
    Rng rng(derive_seed(seed, {i}));
    const auto row = static_cast<Index>(i);
    for (int v : spec.order) {
      double value = 0.0;
      for (const Edge* e : incoming[static_cast<std::size_t>(v)]) value += e->fn(data.values(row, e->from));
      data.values(row, v) = value + spec.noise_sd[static_cast<std::size_t>(v)] * rng.normal();
    }
  });
  return data;
}

std::vector<std::vector<int>> topological_orders(const SemSpec& spec) {
  if (spec.p > 10) throw CapacityError("topological_orders enumerates p! permutations; p <= 10");
  std::vector<int> perm(static_cast<std::size_t>(spec.p));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::vector<int>> out;
  do {
    if (is_topological_order(spec, perm)) out.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

namespace {

void check_oracle_size(const SemSpec& spec, const ClassSpec& cls, Index oracle_n) {
  if (oracle_n < 10 * static_cast<Index>(spec.p) * cls.dict.size())
    throw UsageError("oracle_n must be at least 10 * p * N");
}

}  // namespace

PopulationSigma population_sigma(const SemSpec& spec, const std::vector<int>& perm, const ClassSpec& cls,
                                 Index oracle_n, std::uint64_t seed, unsigned threads) {
  spec.validate();
  require_permutation(perm, spec.p);
  check_oracle_size(spec, cls, oracle_n);
  const DataMatrix data = sample(spec, oracle_n, seed, threads);
  PopulationSigma out;
  out.sigma2.resize(perm.size());
  out.degenerate.resize(perm.size());
  parallel_for(perm.size(), threads, [&](std::size_t j) {
    const auto predictors = sorted_prefix(perm, j);
    const FitResult fit = fit_class(cls, data.values, perm[j], predictors);
    out.sigma2[j] = fit.residual_variance;
    out.degenerate[j] = fit.degenerate;
  });
  return out;
}

GapReport identifiability_gap(const SemSpec& spec, const ClassSpec& cls, Index oracle_n, std::uint64_t seed,
                              unsigned threads, int batches) {
  spec.validate();
  if (spec.p > 8) throw CapacityError("identifiability_gap enumerates p! permutations; p <= 8");
  if (batches < 2) throw UsageError("identifiability_gap needs at least two batches");
  check_oracle_size(spec, cls, oracle_n);
  GapReport report;
  report.batches = batches;
  report.xi = std::numeric_limits<double>::infinity();
  if (spec.p == 1) return report;

  const int p = spec.p;
  const DataMatrix data = sample(spec, oracle_n, seed, threads);
  const Index batch_rows = oracle_n / batches;
  std::vector<Matrix> batch_data;
  for (int b = 0; b < batches; ++b) batch_data.emplace_back(data.values.middleRows(b * batch_rows, batch_rows));

  // sigma2 for every (variable, predecessor mask); slot 0 is the full
  // sample, slots 1..batches the batches.
  const std::size_t masks = std::size_t{1} << p;
  const std::size_t slots = static_cast<std::size_t>(batches) + 1;
  std::vector<double> sigma(static_cast<std::size_t>(p) * masks * slots, std::numeric_limits<double>::quiet_NaN());
  auto at = [&](int v, std::size_t mask, std::size_t slot) -> double& {
    return sigma[(static_cast<std::size_t>(v) * masks + mask) * slots + slot];
  };
  std::vector<std::pair<int, std::size_t>> tasks;
  for (int v = 0; v < p; ++v)
    for (std::size_t mask = 0; mask < masks; ++mask)
      if (!(mask & (std::size_t{1} << v))) tasks.emplace_back(v, mask);
  parallel_for(tasks.size(), threads, [&](std::size_t t) {
    const auto [v, mask] = tasks[t];
    std::vector<int> predictors;
    for (int k = 0; k < p; ++k)
      if (mask & (std::size_t{1} << k)) predictors.push_back(k);
    at(v, mask, 0) = fit_class(cls, data.values, v, predictors).residual_variance;
    for (int b = 0; b < batches; ++b)
      at(v, mask, static_cast<std::size_t>(b) + 1) =
          fit_class(cls, batch_data[static_cast<std::size_t>(b)], v, predictors).residual_variance;
  });

  auto log_sigma_sum = [&](const std::vector<int>& perm, std::size_t slot) {
    double total = 0.0;
    std::size_t mask = 0;
    for (int v : perm) {
      total += 0.5 * std::log(at(v, mask, slot));
      mask |= std::size_t{1} << v;
    }
    return total;
  };

  const double reference = log_sigma_sum(spec.order, 0);
  std::vector<int> perm(static_cast<std::size_t>(p));
  std::iota(perm.begin(), perm.end(), 0);
  do {
    PermutationGap row;
    row.perm = perm;
    row.topological = is_topological_order(spec, perm);
    row.gap = (log_sigma_sum(perm, 0) - reference) / p;
    std::size_t mask = 0;
    for (int v : perm) {
      row.sigma2.push_back(at(v, mask, 0));
      mask |= std::size_t{1} << v;
    }
    if (!row.topological && row.gap < report.xi) {
      report.xi = row.gap;
      report.argmin = perm;
    }
    report.table.push_back(std::move(row));
  } while (std::next_permutation(perm.begin(), perm.end()));

  if (report.argmin.empty()) return report;  // every permutation is topological
  std::vector<double> batch_gaps;
  for (int b = 1; b <= batches; ++b) {
    const auto slot = static_cast<std::size_t>(b);
    batch_gaps.push_back((log_sigma_sum(report.argmin, slot) - log_sigma_sum(spec.order, slot)) / p);
  }
  constexpr double kResolution = 1e-12;
  const double se = summarize(batch_gaps).se;
  report.mc_se = std::sqrt(se * se + kResolution * kResolution);
  return report;
}

}  // namespace semorder
