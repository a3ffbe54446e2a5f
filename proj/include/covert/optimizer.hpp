#pragma once

// Optimal transmit power and admission capacity under the covertness
// constraint DEP >= 1 - eps_e and the reliability constraint RTP >= 1 - eps_u.
//
// The rate is increasing in power, so the optimum is the top of the feasible
// interval [p_low, p_up]. p_low inverts the RTP closed form; p_up is found by
// bisection on DEP after a pre-grid check that DEP is nonincreasing in power.

#include <optional>
#include <vector>

#include "covert/params.hpp"
#include "covert/specfun.hpp"

namespace covert::optimizer {

struct SolverOptions {
  double rel_tol = 1e-6;          ///< bisection width, relative in power
  int pre_grid_points = 16;       ///< log-spaced DEP monotonicity check
  double monotone_slack = 1e-9;   ///< allowed DEP increase between grid points
  double p_absolute_cap = 1e12;   ///< p_low above this is reported infeasible
  specfun::SeriesControl series{};
};

struct PowerBounds {
  double p_low = 0.0;
  double p_up = 0.0;           ///< NaN when DEP < 1 - eps_e already at p_min
  bool feasible = false;       ///< p_up >= p_low and the interval meets [p_min, p_max]
  bool up_clipped = false;     ///< p_up == p_max because DEP(p_max) still meets the target
  bool monotone = true;        ///< false if the DEP pre-grid check failed
};

struct OptimalPowerResult {
  std::optional<double> p_star;
  std::optional<double> rate_star;
  PowerBounds bounds;
};

struct CapacityEntry {
  int k = 0;
  PowerBounds bounds;
};

struct CapacityResult {
  int k_star = 0;  ///< 0 when no k in 1..q is feasible
  std::vector<CapacityEntry> per_k;
};

/// -gamma_u k s0 / (m omega_u ln(1 - eps_u)). Throws InfeasibleError if the
/// result exceeds `p_absolute_cap` (including eps_u so small that it overflows).
double power_lower_bound(const SystemParams& params, double p_absolute_cap = 1e12);

/// sup{ p in [p_min, p_max] : DEP(p) >= 1 - eps_e }.
///
/// Returns p_max when DEP(p_max) meets the target. Throws InfeasibleError if
/// DEP(p_min) misses it, MonotonicityError if the pre-grid shows DEP rising.
double power_upper_bound(const SystemParams& params, double p_min, double p_max,
                         const SolverOptions& options = {});

/// Both bounds plus the feasibility verdict; never throws for infeasibility.
PowerBounds power_bounds(const SystemParams& params, double p_min, double p_max,
                         const SolverOptions& options = {});

/// p_star = p_up and rate_star = covert_rate(p_up) when feasible.
OptimalPowerResult optimal_power(const SystemParams& params, double p_min, double p_max,
                                 const SolverOptions& options = {});

/// Largest k in 1..q with a non-empty feasible power interval. Every k is
/// evaluated; feasibility is not assumed monotone in k.
CapacityResult max_users(const SystemParams& params_template, double p_min, double p_max,
                         const SolverOptions& options = {});

/// k_star for every (p_max, eps_u) pair, sharing one DEP bisection per k.
///
/// With DEP nonincreasing in power, p_up over [p_min, p] equals
/// min(p_up over [p_min, P], p) for any p <= P, and eps_u only moves p_low,
/// so the grid costs one upper-bound search per k. Result is indexed
/// [p_max index][eps_u index].
std::vector<std::vector<int>> capacity_table(const SystemParams& params_template, double p_min,
                                             const std::vector<double>& p_max_values,
                                             const std::vector<double>& eps_u_values,
                                             const SolverOptions& options = {});

}  // namespace covert::optimizer
