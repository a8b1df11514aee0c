#include <functional>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "commands.hpp"
#include "semorder/errors.hpp"
#include "semorder/parallel.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

}  // namespace

int main(int argc, char** argv) {
  using semorder::cli::RunOptions;

  CLI::App app{"Causal order estimation and empirical-process experiments for additive SEMs"};
  app.set_version_flag("--version", SEMORDER_VERSION);
  app.require_subcommand(1);

  RunOptions opts;
  opts.threads = semorder::default_threads();
  std::uint64_t seed = 0;

  const std::map<std::string, std::pair<std::string, std::function<void(const RunOptions&, std::ostream&)>>> commands = {
      {"simulate", {"Sample a data CSV from a structural equations model", semorder::cli::cmd_simulate}},
      {"order", {"Estimate the causal order of a data CSV", semorder::cli::cmd_order}},
      {"rates", {"Convergence-rate experiment for the uniform deviation statistic", semorder::cli::cmd_rates}},
      {"misspec", {"Misspecified least-squares experiment", semorder::cli::cmd_misspec}},
      {"gap", {"Identifiability gap of a model under a working class", semorder::cli::cmd_gap}},
      {"empnorm", {"One-shot empirical-process statistics", semorder::cli::cmd_empnorm}},
  };

  std::vector<std::pair<CLI::App*, std::string>> subs;
  std::vector<CLI::Option*> seed_options;
  for (const auto& [name, entry] : commands) {
    CLI::App* sub = app.add_subcommand(name, entry.first);
    sub->add_option("--config", opts.config_path, "JSON config file")->required();
    seed_options.push_back(sub->add_option("--seed", seed, "Seed; overrides the config's \"seed\""));
    sub->add_option("--out", opts.out_dir, "Output directory")->capture_default_str();
    sub->add_option("--threads", opts.threads, "Worker threads (results do not depend on it)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub->add_flag("--self-test", opts.self_test, "Replace Sigma-hat by Sigma (rates, empnorm)");
    subs.emplace_back(sub, name);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  for (auto* option : seed_options)
    if (option->count() > 0) opts.seed = seed;

  for (const auto& [sub, name] : subs) {
    if (!sub->parsed()) continue;
    if (opts.self_test && name != "rates" && name != "empnorm")
      std::cerr << "note: --self-test has no effect on '" << name << "'\n";
    try {
      commands.at(name).second(opts, std::cout);
    } catch (const semorder::NumericalError& e) {
      std::cerr << "numerical error: " << e.what() << "\n";
      return kExitNumerical;
    } catch (const std::invalid_argument& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kExitUsage;
    } catch (const std::length_error& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kExitUsage;
    } catch (const std::exception& e) {
      std::cerr << "internal error: " << e.what() << "\n";
      return 1;
    }
  }
  return kExitOk;
}
