#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "semorder/bounds.hpp"
#include "semorder/design.hpp"
#include "semorder/empproc.hpp"
#include "semorder/errors.hpp"
#include "semorder/io.hpp"
#include "semorder/misspec.hpp"
#include "semorder/order.hpp"
#include "semorder/rates.hpp"
#include "semorder/rng.hpp"
#include "semorder/semgen.hpp"

#ifndef SEMORDER_VERSION
#define SEMORDER_VERSION "unknown"
#endif

namespace semorder::cli {

namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

template <class T>
T get_or(const Json& j, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw UsageError(std::string("config field '") + key + "': " + e.what());
  }
}

template <class T>
T get_required(const Json& j, const char* key) {
  if (!j.contains(key)) throw UsageError(std::string("config is missing '") + key + "'");
  return get_or<T>(j, key, T{});
}

/// Config, seed and output directory shared by every command.
struct Run {
  std::string command;
  const RunOptions& opts;
  Json config;
  std::uint64_t seed = 0;
  fs::path out;
  std::vector<std::string> outputs;

  Run(std::string name, const RunOptions& o) : command(std::move(name)), opts(o) {
    config = load_config(opts.config_path);
    seed = opts.seed ? *opts.seed : get_or<std::uint64_t>(config, "seed", 0);
    config["seed"] = seed;
    out = opts.out_dir;
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw UsageError("cannot create output directory '" + out.string() + "': " + ec.message());
  }

  void write(const std::string& name, const std::string& content) {
    std::ofstream file(out / name, std::ios::binary);
    if (!file) throw UsageError("cannot write '" + (out / name).string() + "'");
    file << content;
    outputs.push_back(name);
  }

  void write_json(const std::string& name, const Json& j) { write(name, j.dump(2) + "\n"); }

  /// Resolved config plus everything needed to repeat the run.
  void finish() {
    Json manifest = {{"command", command},
                     {"version", SEMORDER_VERSION},
                     {"seed", seed},
                     {"threads", opts.threads},
                     {"self_test", opts.self_test},
                     {"config", config},
                     {"outputs", outputs}};
    std::ofstream file(out / "manifest.json", std::ios::binary);
    if (!file) throw UsageError("cannot write manifest");
    file << manifest.dump(2) << "\n";
  }

  /// Relative paths are tried as given, then next to the config file.
  std::string resolve_path(const std::string& path) const {
    fs::path p(path);
    if (p.is_absolute() || fs::exists(p)) return p.string();
    const fs::path beside = fs::path(opts.config_path).parent_path() / p;
    if (fs::exists(beside)) return beside.string();
    return p.string();
  }
};

std::vector<Index> index_grid(const Json& j, const char* key) {
  std::vector<Index> out;
  for (auto v : get_required<std::vector<long long>>(j, key)) {
    if (v < 1) throw UsageError(std::string(key) + " entries must be positive");
    out.push_back(static_cast<Index>(v));
  }
  if (out.empty()) throw UsageError(std::string(key) + " is empty");
  return out;
}

Json full_class(const Json& config) {
  return io::to_json(io::class_from_json(get_required<Json>(config, "class")));
}

std::string order_table(const OrderEstimate& est) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof line, "%-9s %-9s %-22s %-22s %s\n", "position", "variable", "sigma_hat^2", "log", "note");
  out << line;
  for (std::size_t pos = 0; pos < est.order.size(); ++pos) {
    const double s = est.sigma_hat[pos];
    std::string note;
    for (int f : est.floored_positions) note += f == static_cast<int>(pos) ? "floored " : "";
    for (int d : est.degenerate_positions) note += d == static_cast<int>(pos) ? "degenerate" : "";
    std::snprintf(line, sizeof line, "%-9zu %-9d %-22.12g %-22.12g %s\n", pos + 1, est.order[pos] + 1, s, std::log(s),
                  note.c_str());
    out << line;
  }
  std::snprintf(line, sizeof line, "score %.12g (%s)\n", est.score, to_string(est.method).c_str());
  out << line;
  return out.str();
}

}  // namespace

Json load_config(const std::string& path) {
  if (path.empty()) throw UsageError("--config is required");
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw UsageError("config '" + path + "' is not valid JSON: " + e.what());
  }
}

void cmd_simulate(const RunOptions& opts, std::ostream& log) {
  Run run("simulate", opts);
  const SemSpec spec = io::sem_from_json(get_required<Json>(run.config, "sem"));
  const auto n = get_required<long long>(run.config, "n");
  if (n < 1) throw UsageError("n must be positive");
  run.config["sem"] = io::to_json(spec);

  const DataMatrix data = sample(spec, static_cast<Index>(n), run.seed, opts.threads);
  run.write("data.csv", io::to_csv(data));
  run.finish();
  log << "wrote " << n << " rows x " << spec.p << " columns to " << (run.out / "data.csv").string() << "\n";
}

void cmd_order(const RunOptions& opts, std::ostream& log) {
  Run run("order", opts);
  const ClassSpec cls = io::class_from_json(get_required<Json>(run.config, "class"));
  run.config["class"] = io::to_json(cls);
  const auto method = order_method_from_string(get_or<std::string>(run.config, "method", "exact"));
  run.config["method"] = to_string(method);

  DataMatrix data;
  if (run.config.contains("data")) {
    data = io::read_csv_file(run.resolve_path(get_required<std::string>(run.config, "data")));
  } else if (run.config.contains("sem")) {
    const SemSpec spec = io::sem_from_json(run.config["sem"]);
    run.config["sem"] = io::to_json(spec);
    data = sample(spec, static_cast<Index>(get_required<long long>(run.config, "n")), run.seed, opts.threads);
  } else {
    throw UsageError("order config needs either 'data' (CSV path) or an inline 'sem' with 'n'");
  }

  const OrderEstimate est = estimate_order(data, cls, method, opts.threads);
  const std::string table = order_table(est);
  run.write_json("order.json", io::to_json(est));
  run.write("summary.txt", table);
  run.finish();
  log << table;
}

void cmd_rates(const RunOptions& opts, std::ostream& log) {
  Run run("rates", opts);
  const Json& c = run.config;
  const auto case_name = get_or<std::string>(c, "case", "case4");
  RateConfig rc;
  rc.family = basis_family_from_string(get_or<std::string>(c, "family", "trigonometric"));
  const auto domain = get_or<std::vector<double>>(c, "domain", {0.0, 1.0});
  if (domain.size() != 2) throw UsageError("domain must be [a, b]");
  rc.lower = domain[0];
  rc.upper = domain[1];
  rc.budget = get_or<double>(c, "M", 1.0);
  rc.reps = get_or<int>(c, "reps", 50);
  rc.restarts = get_or<int>(c, "restarts", 64);
  rc.seed = run.seed;
  rc.self_test = opts.self_test;
  rc.threads = opts.threads;

  if (case_name == "case5") {
    rc.rate_case = RateCase::Case4;
    rc.n_grid = {static_cast<Index>(get_required<long long>(c, "n"))};
    rc.p_grid = {get_required<int>(c, "p")};
    rc.size_grid = get_required<std::vector<int>>(c, "N_grid");
    const double alpha = get_or<double>(c, "alpha", 1.0);
    run.config["alpha"] = alpha;
    const TradeoffReport report = approximation_tradeoff(rc, alpha);
    run.write_json("tradeoff.json", io::to_json(report));
    std::ostringstream csv;
    csv << "N,z_mean,bias\n";
    for (const auto& r : report.rows)
      csv << r.dict_size << ',' << io::format_double(r.z_mean) << ',' << io::format_double(r.bias) << '\n';
    run.write("tradeoff.csv", csv.str());
    run.finish();
    if (report.crossing_size > 0)
      log << "crossing N = " << report.crossing_size << "\n";
    else
      log << "no crossing on the N grid\n";
    return;
  }

  rc.rate_case = rate_case_from_string(case_name);
  rc.n_grid = index_grid(c, "n_grid");
  rc.p_grid = get_required<std::vector<int>>(c, "p_grid");
  rc.size_grid = get_required<std::vector<int>>(c, "N_grid");
  run.config["case"] = to_string(rc.rate_case);
  run.config["family"] = to_string(rc.family);
  run.config["domain"] = {rc.lower, rc.upper};
  run.config["M"] = rc.budget;
  run.config["reps"] = rc.reps;
  run.config["restarts"] = rc.restarts;

  const RateReport report = rate_experiment(rc);
  run.write_json("rates.json", io::to_json(report));
  run.write("rates.csv", io::rate_csv(report));
  run.finish();
  for (const auto& s : report.slopes)
    log << "p=" << s.p << " N=" << s.dict_size << " slope " << s.fit.slope << " +/- " << s.fit.slope_se << "\n";
}

void cmd_misspec(const RunOptions& opts, std::ostream& log) {
  Run run("misspec", opts);
  const Json& c = run.config;
  const Json truth = get_required<Json>(c, "truth");
  const int p = get_required<int>(truth, "p");
  const auto domain = get_or<std::vector<double>>(truth, "domain", {-1.0, 1.0});
  if (domain.size() != 2) throw UsageError("truth domain must be [a, b]");
  std::vector<EdgeFunction> terms;
  for (const auto& t : get_required<Json>(truth, "terms"))
    terms.push_back(io::edge_function_from_json(get_required<std::string>(t, "kind"), get_or<Json>(t, "params", Json::object())));
  if (static_cast<int>(terms.size()) != p) throw UsageError("truth needs one term per coordinate");
  const AdditiveDesign design(p, domain[0], domain[1], terms, get_or<double>(truth, "noise_sd", 1.0));

  const ClassSpec cls = io::class_from_json(get_required<Json>(c, "class"));
  run.config["class"] = io::to_json(cls);
  MisspecConfig mc;
  mc.n_grid = index_grid(c, "n_grid");
  mc.reps = get_or<int>(c, "reps", 50);
  mc.oracle_n = static_cast<Index>(get_or<long long>(c, "oracle_n", 200000));
  mc.k_0 = get_or<double>(c, "K0", 1.0);
  mc.seed = run.seed;
  mc.threads = opts.threads;
  run.config["reps"] = mc.reps;
  run.config["oracle_n"] = mc.oracle_n;
  run.config["K0"] = mc.k_0;

  const MisspecReport report = misspec_experiment(design, cls, mc);
  run.write_json("misspec.json", io::to_json(report));
  run.write("misspec.csv", io::misspec_csv(report));
  run.finish();
  log << "slope " << report.slope.slope << " +/- " << report.slope.slope_se << "\n";
}

void cmd_gap(const RunOptions& opts, std::ostream& log) {
  Run run("gap", opts);
  const SemSpec spec = io::sem_from_json(get_required<Json>(run.config, "sem"));
  const ClassSpec cls = io::class_from_json(get_required<Json>(run.config, "class"));
  const auto oracle_n = static_cast<Index>(get_or<long long>(run.config, "oracle_n", 200000));
  const int batches = get_or<int>(run.config, "batches", 10);
  run.config["sem"] = io::to_json(spec);
  run.config["class"] = io::to_json(cls);
  run.config["oracle_n"] = oracle_n;
  run.config["batches"] = batches;

  const GapReport report = identifiability_gap(spec, cls, oracle_n, run.seed, opts.threads, batches);
  run.write_json("gap.json", io::to_json(report));
  run.finish();
  log << "xi = " << report.xi << " (mc se " << report.mc_se << ")\n";
}

void cmd_empnorm(const RunOptions& opts, std::ostream& log) {
  Run run("empnorm", opts);
  const Json& c = run.config;
  const int p = get_or<int>(c, "p", 2);
  const Dictionary dict = io::dictionary_from_json(get_required<Json>(c, "dictionary"));
  const auto n = static_cast<Index>(get_required<long long>(c, "n"));
  const double budget = get_or<double>(c, "M", 1.0);
  const double k_0 = get_or<double>(c, "K0", 1.0);
  const double noise_sd = get_or<double>(c, "noise_sd", 1.0);
  const double u = get_or<double>(c, "u", 0.5);
  const int restarts = get_or<int>(c, "restarts", 64);
  if (p < 1 || n < 2) throw UsageError("empnorm needs p >= 1 and n >= 2");
  run.config["p"] = p;
  run.config["dictionary"] = io::to_json(dict);
  run.config["M"] = budget;
  run.config["K0"] = k_0;
  run.config["noise_sd"] = noise_sd;
  run.config["u"] = u;
  run.config["restarts"] = restarts;

  // Features are the dictionary expansion of p uniform coordinates on the
  // dictionary domain; y is pure noise, so its population cross moment is 0.
  const AdditiveDesign design(p, dict.lower(), dict.upper());
  const Matrix features = design_matrix(dict, design.sample(n, derive_seed(run.seed, {0}), opts.threads).coordinates, false);
  const Matrix sigma = design.population_second_moment(dict, false);
  Vector y = Vector::Zero(n);
  if (!opts.self_test) {
    Rng rng(derive_seed(run.seed, {1}));
    for (Index i = 0; i < n; ++i) y(i) = noise_sd * rng.normal();
  }

  MomentPair mp = MomentPair::from_features(features, sigma);
  mp.p = p;
  mp.dict_size = dict.size();
  mp.k_x = dict.sup_bound();
  if (opts.self_test) mp.sample = sigma;
  const Index dim = sigma.rows();
  const Index block = dict.size();

  // Cross block between the first coordinate's features and the rest.
  const Index rest = p > 1 ? dim - block : block;
  const Index offset = p > 1 ? block : 0;
  const double ip = inner_product_sup(mp.sample.block(0, offset, block, rest), sigma.block(0, offset, block, rest),
                                      sigma.topLeftCorner(block, block), sigma.block(offset, offset, rest, rest), 1.0, 1.0);

  const auto dn = delta_n(mp.k_x, k_0, static_cast<double>(dim), static_cast<double>(n), lambda_min(sigma));
  const auto l1 = z_sup_l1_detailed(mp, budget, restarts, derive_seed(run.seed, {2}));
  Json result = {
      {"n", n},
      {"p", p},
      {"dimension", dim},
      {"z_sup_ellipsoid", z_sup_ellipsoid(mp)},
      {"z_sup_l1", l1.value},
      {"z_sup_l1_grid", l1.grid >= 0.0 ? Json(l1.grid) : Json(nullptr)},
      {"inner_product_sup", ip},
      {"subgauss_product_sup", subgauss_product_sup(features, y, sigma, Vector::Zero(dim))},
      {"delta_n", dn.value},
      {"log_p_vanishes", dn.log_p_vanishes},
      {"lambda_min", lambda_min(sigma)},
      {"k_x", mp.k_x},
      {"entropy_bound_l1", entropy_bound_l1(u, static_cast<double>(dim), static_cast<double>(n), mp.k_x, budget)},
      {"j_integral_l1", j_integral_l1(static_cast<double>(dim), static_cast<double>(n), mp.k_x, budget)},
      {"self_test", opts.self_test}};
  if (p > 1) {
    result["incoherence"] = check_incoherence(sigma, static_cast<int>(block));
    const double c0 = check_eigenvalue_cond(sigma, static_cast<int>(block));
    result["eigenvalue_condition"] = std::isfinite(c0) ? Json(c0) : Json(nullptr);
  }
  run.write_json("empnorm.json", result);
  run.finish();
  log << result.dump(2) << "\n";
}

}  // namespace semorder::cli
