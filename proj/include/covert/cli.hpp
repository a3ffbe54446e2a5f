#pragma once

// Command implementations behind the `covert` executable. Each command
// writes its table or report to `out` and returns the process exit code.

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "covert/params.hpp"
#include "covert/scheduler.hpp"
#include "covert/specfun.hpp"

namespace covert::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidationFailed = 1;
inline constexpr int kExitUsage = 2;

/// Bad key, bad value or bad file; maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class OutputFormat { csv, json };

/// Every setting a command can read. Keys mirror SystemParams and GridConfig
/// field names; `q`, `L` and `m` feed both. `p` is the scheduler horizon,
/// `p_b` the transmit power.
struct RunConfig {
  SystemParams system;
  scheduler::GridConfig grid;
  bool users_per_bs_given = false;

  std::string snr_grid_db = "-10:10:1";
  std::string k_list = "4,8,16";
  std::string k_range = "2:16:1";
  std::string eps_u_list = "0.05,0.1";
  double p_min = 1e-6;
  double p_max = 1e3;
  specfun::SeriesControl series;

  std::uint64_t seed = 1;
  std::uint64_t trials = 10'000;  ///< 0 drops the Monte Carlo columns
  unsigned threads = 0;

  std::string policy = "greedy_belief";
  int episodes = 1;
  std::string trace_path;   ///< schedule: grid trace CSV of episode 0
  std::string stats_path;   ///< schedule: summary JSON

  OutputFormat format = OutputFormat::csv;

  /// Sets one key from text. Throws ConfigError for unknown keys or values
  /// that do not parse as the key's type.
  void set(std::string_view key, std::string_view value);

  /// Applies a "key=value" assignment.
  void assign(std::string_view assignment);

  /// Reads `key = value` lines; '#' starts a comment, blank lines are skipped.
  void load_file(const std::string& path);

  /// Scheduler config with q, L, m taken from `system`; without an explicit
  /// users_per_bs the k users are spread over the m BSs, earlier BSs first.
  scheduler::GridConfig grid_config() const;

  /// Names of every accepted key, sorted.
  static std::vector<std::string> keys();
};

/// "a:b:step" (inclusive) or a comma-separated list.
std::vector<double> parse_grid(std::string_view text);
std::vector<int> parse_int_grid(std::string_view text);

int cmd_dep(const RunConfig& config, std::ostream& out);
int cmd_rtp(const RunConfig& config, std::ostream& out);
int cmd_power_bounds(const RunConfig& config, std::ostream& out);
int cmd_capacity(const RunConfig& config, std::ostream& out);
/// Analytic-vs-Monte-Carlo and special-function identity checks as JSON.
/// Returns 1 if any check fails.
int cmd_validate(const RunConfig& config, std::ostream& out);
int cmd_schedule(const RunConfig& config, std::ostream& out);

}  // namespace covert::cli
