#pragma once

// Real-valued special functions used by the detection and rate closed forms.
//
// Everything here is a pure function of its arguments. Series that involve
// Pochhammer symbols or Gamma ratios are accumulated in log space so that
// factorially growing factors such as (kL)_n do not overflow.

#include <cstddef>

namespace covert::specfun {

/// Truncation control for infinite sums.
struct SeriesControl {
  double rel_tol = 1e-12;
  std::size_t max_terms = 10'000;

  /// Throws DomainError unless rel_tol > 0 and max_terms >= 1.
  void validate() const;
};

/// ln Gamma(x) for x > 0.
double ln_gamma(double x);

/// Regularized upper incomplete gamma Q(s, x) = Gamma(s, x) / Gamma(s).
///
/// Series for x < s + 1, Lentz continued fraction otherwise. x may be +inf.
double reg_gamma_upper(double s, double x);

/// Regularized lower incomplete gamma P(s, x) = 1 - Q(s, x).
double reg_gamma_lower(double s, double x);

/// ln (a)_n = ln Gamma(a + n) - ln Gamma(a). Zero at n = 0.
double log_pochhammer(double a, std::size_t n);

/// Kummer 1F1(a; b; z) by the ascending series.
///
/// Stops once a term is below ctl.rel_tol times the running sum and the
/// terms are shrinking. Throws ConvergenceError (with the partial sum) if
/// max_terms is reached first, DomainError if b is a non-positive integer.
double kummer_1f1(double a, double b, double z, const SeriesControl& ctl = {});

/// ln U(a, b, z) for a > 0, z > 0 and any real b.
///
/// Uses U(a,b,z) = 1/Gamma(a) * int_0^inf e^{-zt} t^{a-1} (1+t)^{b-a-1} dt.
/// The integrand is rescaled by its peak before integration, so very small
/// values such as U(n+1, 2-kL, c) for large n stay representable in log form.
/// The quadrature tolerance is ctl.rel_tol (floored at 1e-11).
double log_tricomi_u(double a, double b, double z, const SeriesControl& ctl = {});

/// Tricomi U(a, b, z) = exp(log_tricomi_u(a, b, z)).
double tricomi_u(double a, double b, double z, const SeriesControl& ctl = {});

/// Exponential integral E1(x) for x > 0.
double exp_integral_e1(double x);

/// e^x E1(x), evaluated without forming e^x or E1(x) separately for x > 1.
double exp_scaled_e1(double x);

}  // namespace covert::specfun
