#include "covert/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "covert/analytic.hpp"
#include "covert/errors.hpp"

namespace covert::optimizer {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_range(double p_min, double p_max) {
  if (!(p_min > 0.0) || !(p_max > p_min) || std::isinf(p_max)) {
    throw DomainError("power range must satisfy 0 < p_min < p_max < inf");
  }
}

bool interval_feasible(double p_low, double p_up, double p_max) {
  return !std::isnan(p_up) && p_up >= p_low && p_low <= p_max;
}

}  // namespace

double power_lower_bound(const SystemParams& params, double p_absolute_cap) {
  params.validate();
  if (params.gamma_u == 0.0) return 0.0;
  const double p = -params.gamma_u * params.k * params.sigma0_sq /
                   (params.m * params.omega_u * std::log1p(-params.eps_u));
  if (!(p <= p_absolute_cap)) {
    throw InfeasibleError("reliability constraint needs power above the absolute cap");
  }
  return p;
}

double power_upper_bound(const SystemParams& params, double p_min, double p_max,
                         const SolverOptions& options) {
  params.validate();
  check_range(p_min, p_max);
  const double target = 1.0 - params.eps_e;
  const auto dep_at = [&](double p) { return analytic::dep(params.with_power(p), options.series); };

  const int n = std::max(options.pre_grid_points, 2);
  const double log_ratio = std::log(p_max / p_min);
  std::vector<double> grid(n);
  std::vector<double> values(n);
  for (int i = 0; i < n; ++i) {
    grid[i] = i == n - 1 ? p_max : p_min * std::exp(log_ratio * i / (n - 1));
    values[i] = dep_at(grid[i]);
    if (i > 0 && values[i] > values[i - 1] + options.monotone_slack) {
      throw MonotonicityError("DEP increases with power on the pre-grid");
    }
  }

  if (values.front() < target) {
    throw InfeasibleError("covertness constraint fails already at p_min");
  }
  if (values.back() >= target) return p_max;

  const auto first_miss =
      std::find_if(values.begin(), values.end(), [&](double v) { return v < target; });
  const auto index = static_cast<std::size_t>(first_miss - values.begin());
  double lo = grid[index - 1];
  double hi = grid[index];
  while (hi / lo - 1.0 > options.rel_tol) {
    const double mid = std::sqrt(lo * hi);
    (dep_at(mid) >= target ? lo : hi) = mid;
  }
  return lo;
}

PowerBounds power_bounds(const SystemParams& params, double p_min, double p_max,
                         const SolverOptions& options) {
  check_range(p_min, p_max);
  PowerBounds bounds;
  try {
    bounds.p_low = power_lower_bound(params, options.p_absolute_cap);
  } catch (const InfeasibleError&) {
    bounds.p_low = std::numeric_limits<double>::infinity();
  }
  try {
    bounds.p_up = power_upper_bound(params, p_min, p_max, options);
    bounds.up_clipped = bounds.p_up == p_max;
  } catch (const InfeasibleError&) {
    bounds.p_up = kNaN;
  } catch (const MonotonicityError&) {
    bounds.p_up = kNaN;
    bounds.monotone = false;
  }
  bounds.feasible = interval_feasible(bounds.p_low, bounds.p_up, p_max);
  return bounds;
}

OptimalPowerResult optimal_power(const SystemParams& params, double p_min, double p_max,
                                 const SolverOptions& options) {
  OptimalPowerResult result;
  result.bounds = power_bounds(params, p_min, p_max, options);
  if (result.bounds.feasible) {
    result.p_star = result.bounds.p_up;
    result.rate_star = analytic::covert_rate(params, *result.p_star);
  }
  return result;
}

CapacityResult max_users(const SystemParams& params_template, double p_min, double p_max,
                         const SolverOptions& options) {
  if (params_template.q < 1) throw DomainError("max_users: q must be >= 1");
  CapacityResult result;
  result.per_k.reserve(params_template.q);
  for (int k = 1; k <= params_template.q; ++k) {
    const PowerBounds bounds = power_bounds(params_template.with_users(k), p_min, p_max, options);
    if (bounds.feasible) result.k_star = k;
    result.per_k.push_back({k, bounds});
  }
  return result;
}

std::vector<std::vector<int>> capacity_table(const SystemParams& params_template, double p_min,
                                             const std::vector<double>& p_max_values,
                                             const std::vector<double>& eps_u_values,
                                             const SolverOptions& options) {
  if (p_max_values.empty() || eps_u_values.empty()) return {};
  const double p_top = *std::max_element(p_max_values.begin(), p_max_values.end());
  check_range(p_min, p_top);

  std::vector<std::vector<int>> k_star(p_max_values.size(),
                                       std::vector<int>(eps_u_values.size(), 0));
  for (int k = 1; k <= params_template.q; ++k) {
    const SystemParams params = params_template.with_users(k);
    double p_up_top = kNaN;
    try {
      p_up_top = power_upper_bound(params, p_min, p_top, options);
    } catch (const InfeasibleError&) {
    } catch (const MonotonicityError&) {
    }
    for (std::size_t e = 0; e < eps_u_values.size(); ++e) {
      SystemParams with_eps = params;
      with_eps.eps_u = eps_u_values[e];
      double p_low = std::numeric_limits<double>::infinity();
      try {
        p_low = power_lower_bound(with_eps, options.p_absolute_cap);
      } catch (const InfeasibleError&) {
      }
      for (std::size_t i = 0; i < p_max_values.size(); ++i) {
        const double p_max = p_max_values[i];
        check_range(p_min, p_max);
        const double p_up = std::isnan(p_up_top) ? kNaN : std::min(p_up_top, p_max);
        if (interval_feasible(p_low, p_up, p_max)) k_star[i][e] = k;
      }
    }
  }
  return k_star;
}

}  // namespace covert::optimizer
