#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <ostream>

#include "covert/analytic.hpp"
#include "covert/cli.hpp"
#include "covert/montecarlo.hpp"
#include "covert/optimizer.hpp"
#include "covert/scheduler.hpp"
#include "table.hpp"

namespace covert::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

montecarlo::ExecutionOptions exec_of(const RunConfig& config) { return {config.threads}; }

SystemParams at_snr(const RunConfig& config, int k, double snr_db) {
  return config.system.with_users(k).with_power(power_from_snr_db(snr_db, config.system.sigma0_sq));
}

// Shared body of the dep and rtp sweeps: `analytic` and `simulate` return
// the closed form and the (mean, se) Monte Carlo estimate for one row.
template <class Analytic, class Simulate>
int sweep(const RunConfig& config, std::ostream& out, const std::string& name,
          Analytic analytic, Simulate simulate) {
  const auto snrs = parse_grid(config.snr_grid_db);
  const auto ks = parse_int_grid(config.k_list);
  const bool with_mc = config.trials > 0;

  Table table{{"snr_db", "k", name + "_analytic"}, {}};
  if (with_mc) {
    table.columns.push_back(name + "_mc_mean");
    table.columns.push_back(name + "_mc_se");
  }

  int status = kExitOk;
  std::uint64_t stream = 0;
  for (int k : ks) {
    for (double snr : snrs) {
      std::vector<Cell> row{snr, std::int64_t{k}};
      const SystemParams params = at_snr(config, k, snr);
      try {
        row.emplace_back(analytic(params));
      } catch (const std::exception&) {
        row.emplace_back(kNaN);
        status = kExitUsage;
      }
      if (with_mc) {
        try {
          const auto estimate = simulate(params, RngSpec{config.seed, stream});
          row.emplace_back(estimate.mean);
          row.emplace_back(estimate.std_error);
        } catch (const std::exception&) {
          row.emplace_back(kNaN);
          row.emplace_back(kNaN);
          status = kExitUsage;
        }
      }
      ++stream;
      table.rows.push_back(std::move(row));
    }
  }
  write_table(out, table, config.format);
  return status;
}

optimizer::SolverOptions solver_options(const RunConfig& config) {
  optimizer::SolverOptions options;
  options.series = config.series;
  return options;
}

}  // namespace

int cmd_dep(const RunConfig& config, std::ostream& out) {
  return sweep(
      config, out, "dep",
      [&](const SystemParams& params) { return analytic::dep(params, config.series); },
      [&](const SystemParams& params, const RngSpec& rng) {
        return montecarlo::simulate_detector(params, config.trials, rng, exec_of(config)).dep();
      });
}

int cmd_rtp(const RunConfig& config, std::ostream& out) {
  return sweep(
      config, out, "rtp", [](const SystemParams& params) { return analytic::rtp(params); },
      [&](const SystemParams& params, const RngSpec& rng) {
        return montecarlo::simulate_rtp(params, config.trials, rng, exec_of(config));
      });
}

int cmd_power_bounds(const RunConfig& config, std::ostream& out) {
  const auto ks = parse_int_grid(config.k_range);
  const bool with_mc = config.trials > 0;
  Table table{{"k", "p_low", "p_up", "feasible", "p_star", "rate_star", "up_clipped"}, {}};
  if (with_mc) {
    table.columns.push_back("rate_mc_mean");
    table.columns.push_back("rate_mc_se");
  }

  int status = kExitOk;
  const auto options = solver_options(config);
  for (std::size_t i = 0; i < ks.size(); ++i) {
    const SystemParams params = config.system.with_users(ks[i]);
    std::vector<Cell> row{std::int64_t{ks[i]}};
    try {
      const auto result = optimizer::optimal_power(params, config.p_min, config.p_max, options);
      const auto& b = result.bounds;
      row.insert(row.end(), {b.p_low, b.p_up, b.feasible, result.p_star.value_or(kNaN),
                             result.rate_star.value_or(kNaN), b.up_clipped});
      if (with_mc) {
        if (result.p_star) {
          const auto estimate = montecarlo::simulate_rate(
              params, *result.p_star, config.trials, RngSpec{config.seed, i}, exec_of(config));
          row.insert(row.end(), {estimate.mean, estimate.std_error});
        } else {
          row.insert(row.end(), {kNaN, kNaN});
        }
      }
    } catch (const std::exception&) {
      row.resize(1);
      row.insert(row.end(), {kNaN, kNaN, false, kNaN, kNaN, false});
      if (with_mc) row.insert(row.end(), {kNaN, kNaN});
      status = kExitUsage;
    }
    table.rows.push_back(std::move(row));
  }
  write_table(out, table, config.format);
  return status;
}

int cmd_capacity(const RunConfig& config, std::ostream& out) {
  const auto snrs = parse_grid(config.snr_grid_db);
  const auto eps_values = parse_grid(config.eps_u_list);

  std::vector<double> budgets;
  std::vector<std::size_t> budget_of(snrs.size(), SIZE_MAX);
  for (std::size_t i = 0; i < snrs.size(); ++i) {
    const double p_max = power_from_snr_db(snrs[i], config.system.sigma0_sq);
    if (p_max > config.p_min && std::isfinite(p_max)) {
      budget_of[i] = budgets.size();
      budgets.push_back(p_max);
    }
  }

  Table table{{"snr_db", "eps_u", "k_star"}, {}};
  int status = kExitOk;
  std::vector<std::vector<int>> k_star;
  try {
    k_star = optimizer::capacity_table(config.system, config.p_min, budgets, eps_values,
                                       solver_options(config));
  } catch (const std::exception&) {
    status = kExitUsage;
  }
  for (std::size_t e = 0; e < eps_values.size(); ++e) {
    for (std::size_t i = 0; i < snrs.size(); ++i) {
      std::vector<Cell> row{snrs[i], eps_values[e]};
      if (status != kExitOk) {
        row.emplace_back(kNaN);
      } else if (budget_of[i] == SIZE_MAX) {
        row.emplace_back(std::int64_t{0});
      } else {
        row.emplace_back(std::int64_t{k_star[budget_of[i]][e]});
      }
      table.rows.push_back(std::move(row));
    }
  }
  write_table(out, table, config.format);
  return status;
}

int cmd_schedule(const RunConfig& config, std::ostream& out) {
  const auto grid = config.grid_config();
  grid.validate();
  const auto policy = scheduler::policy_kind_from_string(config.policy);
  if (config.episodes < 1) throw ConfigError("episodes must be >= 1");

  Table table{{"episode", "policy", "collisions", "jammer_hits", "hop_violations",
               "blocks_delivered", "transmissions", "overloads", "pattern_entropy",
               "jammer_hit_rate"},
              {}};
  scheduler::EpisodeStats total;
  double entropy_sum = 0.0;
  for (int e = 0; e < config.episodes; ++e) {
    scheduler::OccupancyGrid trace;
    const bool want_trace = e == 0 && !config.trace_path.empty();
    const auto stats = scheduler::run_episode(grid, policy, RngSpec{config.seed, std::uint64_t(e)},
                                              want_trace ? &trace : nullptr);
    if (want_trace) {
      std::ofstream trace_out(config.trace_path);
      if (!trace_out) throw ConfigError("cannot write trace file '" + config.trace_path + "'");
      scheduler::write_trace_csv(trace_out, trace);
    }
    const auto count = [](std::uint64_t v) { return static_cast<std::int64_t>(v); };
    table.rows.push_back({std::int64_t{e}, config.policy, count(stats.collisions),
                          count(stats.jammer_hits), count(stats.hop_violations),
                          count(stats.blocks_delivered), count(stats.transmissions),
                          count(stats.overloads), stats.pattern_entropy, stats.jammer_hit_rate()});
    total.collisions += stats.collisions;
    total.jammer_hits += stats.jammer_hits;
    total.hop_violations += stats.hop_violations;
    total.blocks_delivered += stats.blocks_delivered;
    total.transmissions += stats.transmissions;
    total.overloads += stats.overloads;
    entropy_sum += stats.pattern_entropy;
  }
  write_table(out, table, config.format);

  if (!config.stats_path.empty()) {
    nlohmann::ordered_json summary;
    summary["policy"] = config.policy;
    summary["episodes"] = config.episodes;
    summary["seed"] = config.seed;
    summary["collisions"] = total.collisions;
    summary["jammer_hits"] = total.jammer_hits;
    summary["hop_violations"] = total.hop_violations;
    summary["blocks_delivered"] = total.blocks_delivered;
    summary["transmissions"] = total.transmissions;
    summary["overloads"] = total.overloads;
    summary["jammer_hit_rate"] = total.jammer_hit_rate();
    summary["mean_pattern_entropy"] = entropy_sum / config.episodes;
    std::ofstream stats_out(config.stats_path);
    if (!stats_out) throw ConfigError("cannot write stats file '" + config.stats_path + "'");
    stats_out << summary.dump(2) << '\n';
  }
  return kExitOk;
}

}  // namespace covert::cli
