#pragma once

// Independent reference computations used only by the tests. Nothing here
// calls the library's special functions or quadrature.

#include <boost/math/distributions/gamma.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "covert/params.hpp"

namespace oracle {

/// Composite Simpson rule with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double sum = f(a) + f(b);
  for (int i = 1; i < n; ++i) sum += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return sum * h / 3.0;
}

/// Integral over [0, inf) by double-exponential quadrature (Boost).
inline double half_line(const std::function<double(double)>& f, double tol = 1e-13) {
  boost::math::quadrature::exp_sinh<double> rule;
  return rule.integrate(f, tol);
}

/// P(A + B < t) for A ~ Gamma(na, scale_a), B ~ Gamma(nb, scale_b), by
/// convolving the density of A with the CDF of B.
inline double gamma_sum_cdf(double na, double scale_a, double nb, double scale_b, double t,
                            int panels = 4000) {
  if (nb == 0.0) return boost::math::gamma_p(na, t / scale_a);
  const boost::math::gamma_distribution<double> dist_a(na, scale_a);
  // A's density can be spiky; split at its mode to keep Simpson accurate.
  const auto integrand = [&](double a) {
    if (a <= 0.0) return 0.0;
    return boost::math::pdf(dist_a, a) * boost::math::gamma_p(nb, (t - a) / scale_b);
  };
  const double mode = std::min(std::max((na - 1.0) * scale_a, 0.0), t);
  double total = 0.0;
  if (mode > 0.0) total += simpson(integrand, 0.0, mode, panels);
  total += simpson(integrand, mode, t, panels);
  return total;
}

/// Miss-detection probability for a fixed gain g, straight from the model:
/// signal samples have per-sample power rho g + s0, the rest s0.
inline double miss_detection_given_gain(const covert::SystemParams& p, double g) {
  const double threshold = p.effective_threshold();
  return gamma_sum_cdf(static_cast<double>(p.k) * p.L, p.rho() * g + p.sigma0_sq,
                       static_cast<double>(p.q - p.k) * p.L, p.sigma0_sq, threshold);
}

/// Miss-detection probability averaged over g ~ Exp(omega_e).
inline double miss_detection_averaged(const covert::SystemParams& p) {
  return half_line(
      [&](double g) {
        return miss_detection_given_gain(p, g) * std::exp(-g / p.omega_e) / p.omega_e;
      },
      1e-10);
}

/// E[log2(1 + m p h / (k s0))], h ~ Exp(omega_u), by direct integration.
inline double rate_expectation(const covert::SystemParams& p, double power) {
  const double a = p.m * power / (p.k * p.sigma0_sq);
  return half_line([&](double h) {
    return std::log2(1.0 + a * h) * std::exp(-h / p.omega_u) / p.omega_u;
  });
}

/// Largest k in 1..q such that some power on a dense log grid over
/// [p_min, p_max] (endpoints included) satisfies both constraints.
template <class Dep, class Rtp>
int brute_force_max_users(const covert::SystemParams& base, double p_min, double p_max,
                          int grid_points, Dep dep, Rtp rtp) {
  int best = 0;
  for (int k = 1; k <= base.q; ++k) {
    const auto params = base.with_users(k);
    for (int i = 0; i < grid_points; ++i) {
      const double power =
          p_min * std::pow(p_max / p_min, static_cast<double>(i) / (grid_points - 1));
      const auto at = params.with_power(power);
      if (rtp(at) >= 1.0 - at.eps_u && dep(at) >= 1.0 - at.eps_e) {
        best = k;
        break;
      }
    }
  }
  return best;
}

/// Kolmogorov-Smirnov statistic of `samples` against `cdf`.
template <class Cdf>
double ks_statistic(std::vector<double> samples, Cdf cdf) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  return d;
}

}  // namespace oracle
