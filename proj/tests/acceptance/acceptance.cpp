// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "commands.hpp"
#include "oracles.hpp"
#include "semorder/bounds.hpp"
#include "semorder/empproc.hpp"
#include "semorder/misspec.hpp"
#include "semorder/order.hpp"
#include "semorder/parallel.hpp"
#include "semorder/rates.hpp"
#include "semorder/semgen.hpp"

using namespace semorder;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

SemSpec sine_chain(int p, double amplitude, double frequency, double sd) {
  SemSpec s;
  s.p = p;
  s.order.resize(static_cast<std::size_t>(p));
  std::iota(s.order.begin(), s.order.end(), 0);
  for (int j = 1; j < p; ++j) s.edges.push_back(Edge{j - 1, j, edge::Sine{amplitude, frequency}});
  s.noise_sd.assign(static_cast<std::size_t>(p), sd);
  return s;
}

Outcome exact_order_oracle() {
  const auto start = std::chrono::steady_clock::now();
  Rng rng(20240101);
  int mismatches = 0;
  for (int k = 0; k < 100; ++k) {
    const int p = 3 + k % 4;
    // Random additive SEM along a random order, random edge functions.
    SemSpec spec;
    spec.p = p;
    spec.order.resize(static_cast<std::size_t>(p));
    std::iota(spec.order.begin(), spec.order.end(), 0);
    for (int i = p - 1; i > 0; --i) std::swap(spec.order[static_cast<std::size_t>(i)], spec.order[rng.bits() % (i + 1)]);
    for (int a = 0; a < p; ++a)
      for (int b = a + 1; b < p; ++b)
        if (rng.uniform() < 0.5) spec.edges.push_back(Edge{spec.order[a], spec.order[b], edge::Sine{1.0 + rng.uniform(), 1.0}});
    for (int j = 0; j < p; ++j) spec.noise_sd.push_back(0.3 + rng.uniform());
    const auto data = sample(spec, 200, rng.bits());
    const ClassSpec cls{Dictionary(BasisFamily::CubicBSpline, 5, -3.0, 3.0)};
    const double dp = estimate_order_exact(data, cls).score;
    const double brute = oracle::brute_force_min_score(data, cls);
    if (dp != brute) ++mismatches;
  }
  const double t = seconds_since(start);
  return {mismatches == 0 && t < 60.0, fmt("%d/100 bit-identical, %.1f s (limit 60 s)", 100 - mismatches, t)};
}

Outcome ellipsoid_oracle() {
  Rng rng(7);
  int dominated = 0, attained = 0, invariant = 0;
  double worst_gap = 0.0;
  for (int k = 0; k < 100; ++k) {
    const Matrix sigma = oracle::random_spd(3, rng);
    const Matrix l = Eigen::LLT<Matrix>(sigma).matrixL();
    const Matrix z = oracle::random_matrix(40, 3, rng) * l.transpose();
    const Matrix hat = z.transpose() * z / 40.0;
    MomentPair mp;
    mp.sample = hat;
    mp.population = sigma;
    const auto sup = ellipsoid_sup(mp);
    const double scan = oracle::ellipsoid_scan(hat - sigma, sigma, 100000, rng.bits());
    dominated += sup.value >= scan - 1e-12 ? 1 : 0;
    worst_gap = std::max(worst_gap, sup.value - scan);
    const Vector& b = sup.argmax;
    const double at_direction = std::abs(b.dot((hat - sigma) * b)) / b.dot(sigma * b);
    attained += std::abs(at_direction - sup.value) <= 1e-6 ? 1 : 0;
    const Matrix t = oracle::random_matrix(3, 3, rng) + 2.0 * Matrix::Identity(3, 3);
    MomentPair moved;
    moved.sample = t.transpose() * hat * t;
    moved.population = t.transpose() * sigma * t;
    invariant += std::abs(z_sup_ellipsoid(moved) - sup.value) <= 1e-8 ? 1 : 0;
  }
  return {dominated == 100 && attained == 100 && invariant == 100,
          fmt("dominates scan %d/100 (max excess %.2e), attained %d/100, congruence %d/100", dominated, worst_gap,
              attained, invariant)};
}

Outcome rate_check() {
  const auto start = std::chrono::steady_clock::now();
  RateConfig rc;
  rc.rate_case = RateCase::Case4;
  rc.family = BasisFamily::Trigonometric;
  rc.p_grid = {5};
  rc.size_grid = {3};
  for (int e = 8; e <= 14; ++e) rc.n_grid.push_back(Index{1} << e);
  rc.reps = 50;
  rc.seed = 3;
  rc.threads = default_threads();
  const auto report = rate_experiment(rc);
  const double t = seconds_since(start);
  const auto& fit = report.slopes.at(0).fit;
  return {fit.slope >= -0.6 && fit.slope <= -0.4 && t < 300.0,
          fmt("slope %.4f +/- %.4f (want [-0.6, -0.4]), %.1f s (limit 300 s)", fit.slope, fit.slope_se, t)};
}

Outcome misspecified_ls() {
  const AdditiveDesign truth(2, -1.0, 1.0, {edge::Cubic{1.0}, edge::Cubic{1.0}}, 0.5);
  const ClassSpec cls{Dictionary(BasisFamily::Polynomial, 1, -1.0, 1.0)};
  MisspecConfig mc;
  for (int e = 8; e <= 13; ++e) mc.n_grid.push_back(Index{1} << e);
  mc.reps = 50;
  mc.seed = 4;
  mc.threads = default_threads();
  const auto report = misspec_experiment(truth, cls, mc);
  double lo = INFINITY, hi = 0.0;
  for (const auto& c : report.cells) {
    lo = std::min(lo, c.ratio.mean);
    hi = std::max(hi, c.ratio.mean);
  }
  const double slope = report.slope.slope;
  return {slope >= -0.65 && slope <= -0.35 && hi / lo <= 4.0,
          fmt("slope %.4f (want [-0.65, -0.35]), ratio-to-delta_n max/min %.3f (limit 4)", slope, hi / lo)};
}

Outcome dag_consistency() {
  const auto start = std::chrono::steady_clock::now();
  const SemSpec spec = sine_chain(4, 1.0, 3.0, 0.3);
  const ClassSpec cls{Dictionary(BasisFamily::CubicBSpline, 6, -1.5, 1.5)};
  const auto rows = consistency_experiment(spec, cls, {500, 1500, 5000}, 100, OrderMethod::Exact, 5, default_threads());
  const double t = seconds_since(start);
  bool monotone = true;
  std::string freqs;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    freqs += fmt("%s%.2f", i ? ", " : "", rows[i].frequency);
    if (i > 0 && rows[i].frequency < rows[i - 1].frequency - 2.0 * rows[i - 1].binomial_se) monotone = false;
  }
  const double last = rows.back().frequency;
  return {last >= 0.9 && monotone && t < 600.0,
          fmt("recovery at n = 500, 1500, 5000: %s; nondecreasing within 2 SE: %s; %.1f s (limit 600 s)", freqs.c_str(),
              monotone ? "yes" : "no", t)};
}

Outcome identifiability_gap_sign() {
  SemSpec lin;
  lin.p = 2;
  lin.order = {0, 1};
  lin.edges = {Edge{0, 1, edge::Linear{1.0}}};
  lin.noise_sd = {1.0, 1.0};
  const ClassSpec linear{Dictionary(BasisFamily::Polynomial, 1, -10.0, 10.0)};
  const auto g0 = identifiability_gap(lin, linear, 200000, 6, default_threads());

  SemSpec sine = sine_chain(2, 2.0, 1.0, 0.3);
  sine.noise_sd[0] = 1.0;
  const ClassSpec spline{Dictionary(BasisFamily::CubicBSpline, 6, -3.0, 3.0)};
  const auto g1 = identifiability_gap(sine, spline, 200000, 6, default_threads());
  const bool ok = std::abs(g0.xi) <= 3.0 * g0.mc_se && g1.xi > 3.0 * g1.mc_se;
  return {ok, fmt("linear Gaussian xi %.3e (MC SE %.3e); sine chain xi %.4f (MC SE %.2e)", g0.xi, g0.mc_se, g1.xi, g1.mc_se)};
}

Outcome symmetrization() {
  const FeatureSampler gaussian = [](std::uint64_t seed) {
    Rng rng(seed);
    return oracle::random_matrix(200, 2, rng);
  };
  const auto r = rademacher_diagnostic(gaussian, Matrix::Identity(2, 2), 200, 8);
  const double rhs = 2.0 * r.z_eps_mean + 3.0 * r.combined_se;
  return {r.z_mean <= rhs, fmt("Z mean %.4f <= 2 Zeps mean + 3 SE = %.4f", r.z_mean, rhs)};
}

Outcome l1_certificates() {
  Rng rng(9);
  int certified = 0, matched = 0;
  double worst_cert = 0.0, worst_match = 0.0;
  for (int k = 0; k < 200; ++k) {
    const int n = 10 + static_cast<int>(rng.uniform() * 90);
    const int d = 1 + static_cast<int>(rng.uniform() * std::min(n - 1, 12));
    const bool intercept = k % 2 == 0;
    Matrix x = oracle::random_matrix(n, d, rng);
    if (intercept) x.col(0).setOnes();
    const Vector y = x * oracle::random_matrix(d, 1, rng).col(0) + oracle::random_matrix(n, 1, rng).col(0);
    const double budget = 0.01 + 3.0 * rng.uniform();
    L1Options opt;
    opt.tol = 1e-6;
    opt.intercept_first = intercept;
    const auto fit = fit_l1(x, y, budget, opt);
    const double cert = l1_certificate(x, y, fit.coefficients, budget, intercept);
    worst_cert = std::max(worst_cert, cert);
    certified += cert <= 1e-6 ? 1 : 0;

    const auto span = fit_span(x, y);
    const auto wide = fit_l1(x, y, 1e3 * (span.coefficients.lpNorm<1>() + 1.0), opt);
    const double diff = (wide.coefficients - span.coefficients).cwiseAbs().maxCoeff();
    worst_match = std::max(worst_match, diff);
    matched += diff <= 1e-6 ? 1 : 0;
  }
  return {certified == 200 && matched == 200,
          fmt("KKT at 1e-6 %d/200 (worst %.2e); unconstrained limit matches span fit %d/200 (worst %.2e)", certified,
              worst_cert, matched, worst_match)};
}

Outcome formula_fixtures() {
  const double l4 = std::log(4.0);
  const double e = std::abs(entropy_bound_l1(1, 2, 2, 1, 1) - (1 + 8 * l4 * l4));
  const auto dn = delta_n(1, 1, 4, 1000, 1);
  const double d = std::abs(dn.value * dn.value - 8 * l4 / 1000);
  Rng rng(10);
  int ordered = 0;
  for (int k = 0; k < 100; ++k) {
    const int dim = 2 + k % 5;
    const Matrix sigma = oracle::random_spd(dim, rng);
    const Matrix l = Eigen::LLT<Matrix>(sigma).matrixL();
    const Matrix z = oracle::random_matrix(30, dim, rng) * l.transpose();
    MomentPair mp;
    mp.sample = z.transpose() * z / 30.0;
    mp.population = sigma;
    ordered += z_sup_l1(mp, 0.1 + 2.0 * rng.uniform(), 64, k) <= z_sup_ellipsoid(mp) + 1e-8 ? 1 : 0;
  }
  return {e <= 1e-10 && d <= 1e-12 && ordered == 100,
          fmt("entropy error %.1e, delta_n^2 error %.1e, z_sup_l1 <= z_sup_ellipsoid %d/100", e, d, ordered)};
}

Outcome end_to_end_determinism() {
  namespace fs = std::filesystem;
  const fs::path root = fs::absolute("acceptance_tmp");
  fs::create_directories(root);
  const nlohmann::json sim = {
      {"sem", nlohmann::json::parse(R"({"p": 4, "edges": [
          {"from": 1, "to": 2, "kind": "sine", "params": {"amplitude": 1, "frequency": 3}},
          {"from": 2, "to": 3, "kind": "tanh", "params": {"scale": 2}},
          {"from": 1, "to": 4, "kind": "cubic", "params": {"scale": 0.5}}], "noise_sd": [0.5, 0.3, 0.3, 0.4]})")},
      {"n", 2000}};
  std::ofstream(root / "simulate.json") << sim.dump();
  const unsigned many = std::max(4u, default_threads());
  std::vector<std::string> outputs;
  std::ostringstream log;
  for (int round = 0; round < 2; ++round) {
    for (unsigned threads : {1u, many}) {
      const fs::path dir = root / fmt("run%d_t%u", round, threads);
      cli::RunOptions opts;
      opts.config_path = (root / "simulate.json").string();
      opts.seed = 2024;
      opts.threads = threads;
      opts.out_dir = dir.string();
      cli::cmd_simulate(opts, log);
      const nlohmann::json ord = {
          {"data", (dir / "data.csv").string()},
          {"class", nlohmann::json::parse(R"({"dictionary": {"family": "cubic-b-spline", "size": 6, "domain": [-3, 3]}})")}};
      std::ofstream(dir / "order_config.json") << ord.dump();
      opts.config_path = (dir / "order_config.json").string();
      cli::cmd_order(opts, log);
      std::ifstream in(dir / "order.json", std::ios::binary);
      std::stringstream text;
      text << in.rdbuf();
      outputs.push_back(text.str());
    }
  }
  const bool same = std::all_of(outputs.begin(), outputs.end(), [&](const std::string& s) { return s == outputs[0]; });
  return {same && !outputs[0].empty(), fmt("%zu runs (threads 1 and %u, twice each) byte-identical: %s", outputs.size(),
                                           many, same ? "yes" : "no")};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"exact order equals brute-force enumeration", exact_order_oracle},
      {"ellipsoid supremum oracle", ellipsoid_oracle},
      {"case4 rate slope", rate_check},
      {"misspecified least squares", misspecified_ls},
      {"DAG order consistency", dag_consistency},
      {"identifiability gap sign", identifiability_gap_sign},
      {"symmetrization inequality", symmetrization},
      {"l1 solver certificates", l1_certificates},
      {"formula fixtures", formula_fixtures},
      {"end-to-end determinism", end_to_end_determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome out;
    try {
      out = criteria[i].second();
    } catch (const std::exception& e) {
      out = {false, std::string("threw: ") + e.what()};
    }
    failures += out.pass ? 0 : 1;
    std::printf("%s  %2zu  %s: %s\n", out.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, out.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
