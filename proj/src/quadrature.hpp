#pragma once

// Thin wrapper over Boost.Math adaptive Gauss-Kronrod quadrature.

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "covert/errors.hpp"

namespace covert::detail {

inline std::string quadrature_failure(const char* rule, double error, double l1) {
  char buffer[128];
  std::snprintf(buffer, sizeof buffer, "%s quadrature did not converge (error %.3g, L1 %.3g)", rule, error, l1);
  return buffer;
}

inline constexpr unsigned kQuadMaxDepth = 15;

// Integrands here carry ~1e-13 relative rounding noise; asking for less
// than this only drives pointless subdivision.
inline constexpr double kQuadTolFloor = 1e-11;

/// Adaptive G-K integral of f over [a, b] (b may be +inf) to relative
/// tolerance rel_tol of the L1 norm. Throws ConvergenceError when the
/// estimated error stays far above the request and above `abs_floor`.
template <class F>
double integrate(F&& f, double a, double b, double rel_tol, double abs_floor = 0.0) {
  const double tol = std::max(rel_tol, kQuadTolFloor);
  double error = 0.0;
  double l1 = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      f, a, b, kQuadMaxDepth, tol, &error, &l1);
  if (!std::isfinite(value) || error > std::max(std::max(1e3 * tol, 1e-6) * l1, abs_floor) + 1e-300) {
    throw ConvergenceError(quadrature_failure("adaptive", error, l1), value, kQuadMaxDepth);
  }
  return value;
}

/// Integral over a finite [a, b] whose integrand may blow up, or lose
/// smoothness, at the endpoints (tanh-sinh rule).
template <class F>
double integrate_endpoint_singular(F&& f, double a, double b, double rel_tol) {
  const double tol = std::max(rel_tol, kQuadTolFloor);
  thread_local boost::math::quadrature::tanh_sinh<double> rule;
  double error = 0.0;
  double l1 = 0.0;
  const double value = rule.integrate(f, a, b, tol, &error, &l1);
  if (!std::isfinite(value) || error > std::max(1e3 * tol, 1e-6) * l1 + 1e-300) {
    throw ConvergenceError(quadrature_failure("tanh-sinh", error, l1), value, 0);
  }
  return value;
}

}  // namespace covert::detail
