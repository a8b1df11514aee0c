#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

namespace semorder::cli {

struct RunOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;  ///< overrides the config's "seed"
  std::string out_dir = "out";
  unsigned threads = 1;
  bool self_test = false;
};

/// Each command reads its JSON config, writes artifacts plus manifest.json
/// into out_dir and returns normally, or throws UsageError / CapacityError
/// (exit 2) or NumericalError (exit 3).
void cmd_simulate(const RunOptions& opts, std::ostream& log);
void cmd_order(const RunOptions& opts, std::ostream& log);
void cmd_rates(const RunOptions& opts, std::ostream& log);
void cmd_misspec(const RunOptions& opts, std::ostream& log);
void cmd_gap(const RunOptions& opts, std::ostream& log);
void cmd_empnorm(const RunOptions& opts, std::ostream& log);

nlohmann::json load_config(const std::string& path);

}  // namespace semorder::cli
