#include "semorder/rates.hpp"

#include <cmath>
#include <map>
#include <tuple>

#include "semorder/design.hpp"
#include "semorder/empproc.hpp"
#include "semorder/errors.hpp"
#include "semorder/linalg.hpp"
#include "semorder/parallel.hpp"
#include "semorder/rng.hpp"

namespace semorder {

std::string to_string(RateCase c) {
  switch (c) {
    case RateCase::Case3: return "case3";
    case RateCase::Case4: return "case4";
    case RateCase::L1Theorem: return "l1_theorem";
    case RateCase::L3Theorem: return "l3_theorem";
  }
  return "unknown";
}

RateCase rate_case_from_string(const std::string& name) {
  if (name == "case3") return RateCase::Case3;
  if (name == "case4") return RateCase::Case4;
  if (name == "l1_theorem") return RateCase::L1Theorem;
  if (name == "l3_theorem") return RateCase::L3Theorem;
  throw UsageError("unknown rate case '" + name + "'");
}

namespace {

bool uses_l1(RateCase c) { return c == RateCase::Case3 || c == RateCase::L1Theorem; }

struct Job {
  std::size_t cell = 0;
  int rep = 0;
};

}  // namespace

RateReport rate_experiment(const RateConfig& config) {
  if (config.reps < 1) throw UsageError("rate_experiment needs reps >= 1");
  if (config.n_grid.empty() || config.p_grid.empty() || config.size_grid.empty())
    throw UsageError("rate_experiment needs non-empty n, p and N grids");
  if (uses_l1(config.rate_case) && !(config.budget > 0.0)) throw UsageError("l1 rate cases need a positive budget");

  RateReport report;
  report.rate_case = config.rate_case;
  struct Setting {
    Dictionary dict;
    Matrix sigma;
  };
  std::map<std::pair<int, int>, Setting> settings;
  for (int p : config.p_grid) {
    for (int size : config.size_grid) {
      Dictionary dict(config.family, size, config.lower, config.upper);
      AdditiveDesign design(p, config.lower, config.upper);
      settings.emplace(std::make_pair(p, size), Setting{dict, design.population_second_moment(dict, false)});
      for (Index n : config.n_grid) {
        if (p > n || static_cast<Index>(p) * size + 1 > n)
          throw UsageError("rate grid cell violates p <= n and pN + 1 <= n");
        RateCell cell;
        cell.n = n;
        cell.p = p;
        cell.dict_size = size;
        cell.budget = config.rate_case == RateCase::Case3 ? p * config.budget : config.budget;
        cell.seed = derive_seed(config.seed, {report.cells.size()});
        cell.reps = config.reps;
        report.cells.push_back(cell);
      }
    }
  }

  std::vector<Job> jobs;
  for (std::size_t c = 0; c < report.cells.size(); ++c)
    for (int r = 0; r < config.reps; ++r) jobs.push_back({c, r});
  // NaN marks a skipped replication.
  std::vector<double> values(jobs.size(), 0.0);
  parallel_for(jobs.size(), config.threads, [&](std::size_t j) {
    const RateCell& cell = report.cells[jobs[j].cell];
    const Setting& setting = settings.at({cell.p, cell.dict_size});
    const AdditiveDesign design(cell.p, config.lower, config.upper);
    const std::uint64_t rep_seed = derive_seed(cell.seed, {static_cast<std::uint64_t>(jobs[j].rep)});
    const Matrix features = design_matrix(setting.dict, design.sample(cell.n, rep_seed).coordinates, false);
    MomentPair mp = MomentPair::from_features(features, setting.sigma);
    mp.p = cell.p;
    mp.dict_size = cell.dict_size;
    if (config.self_test) mp.sample = mp.population;
    if (!(linalg::min_eigenvalue(mp.sample) > 1e-12 * mp.sample.trace())) {
      values[j] = std::numeric_limits<double>::quiet_NaN();
      return;
    }
    values[j] = uses_l1(config.rate_case) ? z_sup_l1(mp, cell.budget, config.restarts, derive_seed(rep_seed, {1}))
                                          : z_sup_ellipsoid(mp);
  });

  for (std::size_t j = 0; j < jobs.size(); ++j) {
    RateCell& cell = report.cells[jobs[j].cell];
    if (std::isnan(values[j])) {
      cell.degenerate = true;
      continue;
    }
    cell.values.push_back(values[j]);
  }
  for (auto& cell : report.cells) {
    cell.reps_used = static_cast<int>(cell.values.size());
    cell.z = summarize(cell.values);
  }

  std::map<std::tuple<int, int, double>, std::pair<std::vector<double>, std::vector<double>>> groups;
  for (const auto& cell : report.cells) {
    if (cell.reps_used == 0 || !(cell.z.mean > 0.0)) continue;
    auto& g = groups[{cell.p, cell.dict_size, cell.budget}];
    g.first.push_back(static_cast<double>(cell.n));
    g.second.push_back(cell.z.mean);
  }
  for (const auto& [key, xy] : groups) {
    if (xy.first.size() < 2) continue;
    RateSlope slope;
    std::tie(slope.p, slope.dict_size, slope.budget) = key;
    slope.fit = fit_loglog(xy.first, xy.second);
    report.slopes.push_back(slope);
  }
  return report;
}

TradeoffReport approximation_tradeoff(RateConfig config, double alpha) {
  if (!(alpha > 0.0)) throw UsageError("approximation_tradeoff needs alpha > 0");
  if (config.n_grid.size() != 1 || config.p_grid.size() != 1)
    throw UsageError("approximation_tradeoff runs at a single (n, p)");
  config.rate_case = RateCase::Case4;
  const RateReport rates = rate_experiment(config);
  TradeoffReport out;
  out.alpha = alpha;
  out.n = config.n_grid.front();
  out.p = config.p_grid.front();
  for (const auto& cell : rates.cells) {
    TradeoffRow row;
    row.dict_size = cell.dict_size;
    row.z_mean = cell.z.mean;
    row.bias = out.p * std::pow(static_cast<double>(cell.dict_size), -1.0 / (2.0 * alpha));
    if (out.crossing_size == 0 && row.bias <= row.z_mean) out.crossing_size = row.dict_size;
    out.rows.push_back(row);
  }
  return out;
}

}  // namespace semorder
