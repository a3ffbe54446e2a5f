#include <fstream>
#include <iostream>
#include <locale>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "covert/cli.hpp"
#include "covert/errors.hpp"

namespace {

using covert::cli::RunConfig;

// Adds `--flag VALUE` to `sub` that overrides config key `key`.
void add_override(CLI::App* sub, std::vector<std::string>& overrides, const std::string& flag,
          const std::string& key, const std::string& help) {
  sub->add_option_function<std::string>(
      flag, [&overrides, key](const std::string& value) { overrides.push_back(key + "=" + value); },
      help);
}

}  // namespace

int main(int argc, char** argv) {
  std::locale::global(std::locale::classic());

  CLI::App app{"Covert multi-cell downlink: detection error, reliability, power and scheduling sweeps"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string out_path;
  std::vector<std::string> assignments;
  std::vector<std::string> overrides;

  app.add_option("--config", config_path, "key=value config file")->check(CLI::ExistingFile);
  app.add_option("--set", assignments, "override one config key, key=value (repeatable)");
  app.add_option("--out", out_path, "write output here instead of stdout");
  add_override(&app, overrides, "--seed", "seed", "RNG seed");
  add_override(&app, overrides, "--trials", "trials", "Monte Carlo trials (0 disables)");
  add_override(&app, overrides, "--threads", "threads", "worker threads (0 = all cores)");
  add_override(&app, overrides, "--format", "format", "csv or json");

  auto* dep = app.add_subcommand("dep", "DEP vs SNR per k, analytic and Monte Carlo");
  auto* rtp = app.add_subcommand("rtp", "RTP vs SNR per k, analytic and Monte Carlo");
  for (auto* sub : {dep, rtp}) {
    add_override(sub, overrides, "--snr", "snr_grid_db", "SNR grid in dB, start:stop:step or a,b,c");
    add_override(sub, overrides, "--k", "k_list", "user counts, list or range");
  }
  auto* bounds = app.add_subcommand("power-bounds", "feasible power interval and optimal rate per k");
  add_override(bounds, overrides, "--k-range", "k_range", "user counts, list or range");
  add_override(bounds, overrides, "--p-min", "p_min", "lowest power considered (W)");
  add_override(bounds, overrides, "--p-max", "p_max", "highest power considered (W)");
  auto* capacity = app.add_subcommand("capacity", "admissible users k* vs SNR and eps_u");
  add_override(capacity, overrides, "--snr", "snr_grid_db", "SNR grid in dB; sets the power budget");
  add_override(capacity, overrides, "--eps-u", "eps_u_list", "reliability slacks");
  auto* validate = app.add_subcommand("validate", "analytic vs Monte Carlo and identity checks (JSON)");
  auto* schedule = app.add_subcommand("schedule", "slot scheduler episodes");
  add_override(schedule, overrides, "--policy", "policy", "greedy_belief or random_hop");
  add_override(schedule, overrides, "--episodes", "episodes", "number of episodes");
  add_override(schedule, overrides, "--trace", "trace", "write the episode-0 occupancy grid CSV here");
  add_override(schedule, overrides, "--stats", "stats", "write summary stats JSON here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? covert::cli::kExitOk : covert::cli::kExitUsage;
  }

  try {
    RunConfig config;
    if (!config_path.empty()) config.load_file(config_path);
    for (const auto& a : assignments) config.assign(a);
    for (const auto& a : overrides) config.assign(a);

    std::ofstream file;
    if (!out_path.empty()) {
      file.open(out_path);
      if (!file) throw covert::cli::ConfigError("cannot write '" + out_path + "'");
    }
    std::ostream& out = out_path.empty() ? std::cout : file;

    using namespace covert::cli;
    if (dep->parsed()) return cmd_dep(config, out);
    if (rtp->parsed()) return cmd_rtp(config, out);
    if (bounds->parsed()) return cmd_power_bounds(config, out);
    if (capacity->parsed()) return cmd_capacity(config, out);
    if (validate->parsed()) return cmd_validate(config, out);
    if (schedule->parsed()) return cmd_schedule(config, out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return covert::cli::kExitUsage;
  }
  return covert::cli::kExitUsage;
}
