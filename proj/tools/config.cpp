#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>

#include "covert/cli.hpp"
#include "covert/errors.hpp"

namespace covert::cli {

namespace {

std::string_view trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r");
  return text.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view type) {
  throw ConfigError("invalid value '" + std::string(value) + "' for '" + std::string(key) +
                    "' (expected " + std::string(type) + ")");
}

template <class T>
T parse_number(std::string_view key, std::string_view text, std::string_view type) {
  text = trim(text);
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    bad_value(key, text, type);
  }
  return value;
}

double parse_real(std::string_view key, std::string_view text) {
  const double value = parse_number<double>(key, text, "a number");
  if (std::isnan(value)) bad_value(key, text, "a number");
  return value;
}

int parse_int(std::string_view key, std::string_view text) {
  return parse_number<int>(key, text, "an integer");
}

bool parse_bool(std::string_view key, std::string_view text) {
  text = trim(text);
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  bad_value(key, text, "true or false");
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    parts.push_back(trim(text.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::vector<int> parse_int_list(std::string_view key, std::string_view text) {
  std::vector<int> values;
  if (trim(text).empty()) return values;
  for (auto part : split(text, ',')) values.push_back(parse_int(key, part));
  return values;
}

using Setter = std::function<void(RunConfig&, std::string_view, std::string_view)>;

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = [] {
    std::map<std::string, Setter, std::less<>> t;
    const auto real = [&t](const char* name, auto member) {
      t[name] = [member](RunConfig& c, std::string_view k, std::string_view v) {
        member(c) = parse_real(k, v);
      };
    };
    const auto integer = [&t](const char* name, auto member) {
      t[name] = [member](RunConfig& c, std::string_view k, std::string_view v) {
        member(c) = parse_int(k, v);
      };
    };
    const auto boolean = [&t](const char* name, auto member) {
      t[name] = [member](RunConfig& c, std::string_view k, std::string_view v) {
        member(c) = parse_bool(k, v);
      };
    };
    const auto text = [&t](const char* name, auto member) {
      t[name] = [member](RunConfig& c, std::string_view, std::string_view v) {
        member(c) = std::string(trim(v));
      };
    };
    const auto grid_spec = [&t](const char* name, auto member, bool integral) {
      t[name] = [member, integral](RunConfig& c, std::string_view, std::string_view v) {
        if (integral) {
          parse_int_grid(v);
        } else {
          parse_grid(v);
        }
        member(c) = std::string(trim(v));
      };
    };

    integer("m", [](RunConfig& c) -> int& { return c.system.m; });
    integer("k", [](RunConfig& c) -> int& { return c.system.k; });
    integer("q", [](RunConfig& c) -> int& { return c.system.q; });
    integer("L", [](RunConfig& c) -> int& { return c.system.L; });
    real("p_b", [](RunConfig& c) -> double& { return c.system.p_b; });
    real("sigma0_sq", [](RunConfig& c) -> double& { return c.system.sigma0_sq; });
    real("omega_e", [](RunConfig& c) -> double& { return c.system.omega_e; });
    real("omega_u", [](RunConfig& c) -> double& { return c.system.omega_u; });
    real("gamma_e", [](RunConfig& c) -> double& { return c.system.gamma_e; });
    real("gamma_u", [](RunConfig& c) -> double& { return c.system.gamma_u; });
    real("eps_e", [](RunConfig& c) -> double& { return c.system.eps_e; });
    real("eps_u", [](RunConfig& c) -> double& { return c.system.eps_u; });
    t["threshold_mode"] = [](RunConfig& c, std::string_view k, std::string_view v) {
      try {
        c.system.threshold_mode = threshold_mode_from_string(trim(v));
      } catch (const std::exception&) {
        bad_value(k, v, "raw or per_sample_normalized");
      }
    };

    integer("p", [](RunConfig& c) -> int& { return c.grid.p; });
    t["users_per_bs"] = [](RunConfig& c, std::string_view k, std::string_view v) {
      c.grid.users_per_bs = parse_int_list(k, v);
      c.users_per_bs_given = true;
    };
    t["jammed_slots"] = [](RunConfig& c, std::string_view k, std::string_view v) {
      c.grid.jammed_slots = parse_int_list(k, v);
    };
    real("external_occupancy_prob", [](RunConfig& c) -> double& { return c.grid.external_occupancy_prob; });
    real("sense_miss_prob", [](RunConfig& c) -> double& { return c.grid.sense_miss_prob; });
    real("sense_fa_prob", [](RunConfig& c) -> double& { return c.grid.sense_fa_prob; });
    real("persistence", [](RunConfig& c) -> double& { return c.grid.persistence; });
    real("initial_belief", [](RunConfig& c) -> double& { return c.grid.initial_belief; });
    boolean("distinct_within_block", [](RunConfig& c) -> bool& { return c.grid.distinct_within_block; });
    boolean("shared_control_matrix", [](RunConfig& c) -> bool& { return c.grid.shared_control_matrix; });
    boolean("random_hop_uses_beliefs", [](RunConfig& c) -> bool& { return c.grid.random_hop_uses_beliefs; });
    boolean("greedy_random_ties", [](RunConfig& c) -> bool& { return c.grid.greedy_random_ties; });

    grid_spec("snr_grid_db", [](RunConfig& c) -> std::string& { return c.snr_grid_db; }, false);
    grid_spec("k_list", [](RunConfig& c) -> std::string& { return c.k_list; }, true);
    grid_spec("k_range", [](RunConfig& c) -> std::string& { return c.k_range; }, true);
    grid_spec("eps_u_list", [](RunConfig& c) -> std::string& { return c.eps_u_list; }, false);
    real("p_min", [](RunConfig& c) -> double& { return c.p_min; });
    real("p_max", [](RunConfig& c) -> double& { return c.p_max; });
    real("rel_tol", [](RunConfig& c) -> double& { return c.series.rel_tol; });
    t["max_terms"] = [](RunConfig& c, std::string_view k, std::string_view v) {
      c.series.max_terms = parse_number<std::size_t>(k, v, "a non-negative integer");
    };

    t["seed"] = [](RunConfig& c, std::string_view k, std::string_view v) {
      c.seed = parse_number<std::uint64_t>(k, v, "an unsigned 64-bit integer");
    };
    t["trials"] = [](RunConfig& c, std::string_view k, std::string_view v) {
      c.trials = parse_number<std::uint64_t>(k, v, "a non-negative integer");
    };
    t["threads"] = [](RunConfig& c, std::string_view k, std::string_view v) {
      c.threads = parse_number<unsigned>(k, v, "a non-negative integer");
    };

    t["policy"] = [](RunConfig& c, std::string_view k, std::string_view v) {
      try {
        scheduler::policy_kind_from_string(std::string(trim(v)));
      } catch (const std::exception&) {
        bad_value(k, v, "greedy_belief or random_hop");
      }
      c.policy = std::string(trim(v));
    };
    integer("episodes", [](RunConfig& c) -> int& { return c.episodes; });
    text("trace", [](RunConfig& c) -> std::string& { return c.trace_path; });
    text("stats", [](RunConfig& c) -> std::string& { return c.stats_path; });
    t["format"] = [](RunConfig& c, std::string_view k, std::string_view v) {
      v = trim(v);
      if (v == "csv") {
        c.format = OutputFormat::csv;
      } else if (v == "json") {
        c.format = OutputFormat::json;
      } else {
        bad_value(k, v, "csv or json");
      }
    };
    return t;
  }();
  return table;
}

}  // namespace

std::vector<double> parse_grid(std::string_view text) {
  text = trim(text);
  std::vector<double> values;
  if (text.find(':') != std::string_view::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) throw ConfigError("grid '" + std::string(text) + "' must be start:stop:step");
    const double start = parse_real("grid", parts[0]);
    const double stop = parse_real("grid", parts[1]);
    const double step = parse_real("grid", parts[2]);
    if (!(step > 0.0) || !(stop >= start) || std::isinf(stop - start)) {
      throw ConfigError("grid '" + std::string(text) + "' needs step > 0 and stop >= start");
    }
    const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9)) + 1;
    if (count > 1'000'000) throw ConfigError("grid '" + std::string(text) + "' is too long");
    for (long i = 0; i < count; ++i) values.push_back(start + static_cast<double>(i) * step);
    return values;
  }
  for (auto part : split(text, ',')) values.push_back(parse_real("grid", part));
  return values;
}

std::vector<int> parse_int_grid(std::string_view text) {
  std::vector<int> values;
  for (double v : parse_grid(text)) {
    if (v != std::round(v) || std::abs(v) > 1e9) {
      throw ConfigError("grid '" + std::string(trim(text)) + "' must contain integers");
    }
    values.push_back(static_cast<int>(v));
  }
  return values;
}

void RunConfig::set(std::string_view key, std::string_view value) {
  key = trim(key);
  const auto& table = setters();
  const auto it = table.find(key);
  if (it == table.end()) throw ConfigError("unknown config key '" + std::string(key) + "'");
  it->second(*this, key, value);
}

void RunConfig::assign(std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError("expected key=value, got '" + std::string(assignment) + "'");
  }
  set(assignment.substr(0, eq), assignment.substr(eq + 1));
}

void RunConfig::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    std::string_view view = line;
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    if (trim(view).empty()) continue;
    try {
      assign(view);
    } catch (const ConfigError& e) {
      throw ConfigError(path + ":" + std::to_string(number) + ": " + e.what());
    }
  }
}

scheduler::GridConfig RunConfig::grid_config() const {
  scheduler::GridConfig cfg = grid;
  cfg.q = system.q;
  cfg.L = system.L;
  cfg.m = system.m;
  if (!users_per_bs_given) {
    if (system.m < 1 || system.k < 0) throw ConfigError("m must be >= 1 and k >= 0");
    cfg.users_per_bs.assign(system.m, system.k / system.m);
    for (int b = 0; b < system.k % system.m; ++b) ++cfg.users_per_bs[b];
  }
  return cfg;
}

std::vector<std::string> RunConfig::keys() {
  std::vector<std::string> names;
  for (const auto& [name, setter] : setters()) names.push_back(name);
  return names;
}

}  // namespace covert::cli
