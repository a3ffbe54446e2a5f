#include "covert/specfun.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "covert/errors.hpp"
#include "quadrature.hpp"

namespace covert::specfun {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = 1e-300;
constexpr std::size_t kMaxGammaIter = 100'000;

// lnGamma(s) - [(s - 1/2) ln s - s + ln(2 pi) / 2], valid for s >= 10.
double stirling_correction(double s) {
  const double r = 1.0 / s;
  const double r2 = r * r;
  return r * (1.0 / 12.0 -
              r2 * (1.0 / 360.0 - r2 * (1.0 / 1260.0 - r2 * (1.0 / 1680.0 - r2 / 1188.0))));
}

// t - ln(1 + t) for t > -1, without cancellation near t = 0.
double t_minus_log1p(double t) {
  if (std::abs(t) > 0.25) return t - std::log1p(t);
  // sum_{j>=2} (-1)^j t^j / j
  double power = t * t;
  double sum = 0.0;
  for (int j = 2; j < 200; ++j) {
    const double term = power / j;
    sum += (j % 2 == 0) ? term : -term;
    if (std::abs(term) <= kEps * std::abs(sum)) break;
    power *= t;
  }
  return sum;
}

// ln( x^s e^{-x} / Gamma(s) ).
double log_gamma_prefactor(double s, double x) {
  if (s < 10.0) return s * std::log(x) - x - ln_gamma(s);
  const double t = (x - s) / s;
  return 0.5 * std::log(s / (2.0 * std::numbers::pi)) - s * t_minus_log1p(t) -
         stirling_correction(s);
}

void check_gamma_args(double s, double x, const char* fn) {
  if (!(s > 0.0) || !(x >= 0.0) || std::isnan(s)) {
    throw DomainError(std::string(fn) + ": requires s > 0 and x >= 0");
  }
}

// P(s, x) by the power series; caller guarantees 0 < x < s + 1.
double lower_series(double s, double x) {
  double ap = s;
  double term = 1.0 / s;
  double sum = term;
  for (std::size_t n = 0; n < kMaxGammaIter; ++n) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (term < sum * kEps) return sum * std::exp(log_gamma_prefactor(s, x));
  }
  throw ConvergenceError("reg_gamma_lower: series did not converge", sum, kMaxGammaIter);
}

// Q(s, x) by the modified Lentz continued fraction; caller guarantees x >= s + 1.
double upper_fraction(double s, double x) {
  double b = x + 1.0 - s;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (std::size_t i = 1; i < kMaxGammaIter; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - s);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) return h * std::exp(log_gamma_prefactor(s, x));
  }
  throw ConvergenceError("reg_gamma_upper: continued fraction did not converge", h,
                         kMaxGammaIter);
}

}  // namespace

void SeriesControl::validate() const {
  if (!(rel_tol > 0.0)) throw DomainError("SeriesControl: rel_tol must be > 0");
  if (max_terms < 1) throw DomainError("SeriesControl: max_terms must be >= 1");
}

double ln_gamma(double x) {
  if (!(x > 0.0)) throw DomainError("ln_gamma: requires x > 0");
#if defined(__GLIBC__) || defined(__APPLE__)
  int sign = 0;
  return ::lgamma_r(x, &sign);
#else
  return std::lgamma(x);
#endif
}

double reg_gamma_upper(double s, double x) {
  check_gamma_args(s, x, "reg_gamma_upper");
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  if (x < s + 1.0) return 1.0 - lower_series(s, x);
  return upper_fraction(s, x);
}

double reg_gamma_lower(double s, double x) {
  check_gamma_args(s, x, "reg_gamma_lower");
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  if (x < s + 1.0) return lower_series(s, x);
  return 1.0 - upper_fraction(s, x);
}

double log_pochhammer(double a, std::size_t n) {
  if (!(a > 0.0)) throw DomainError("log_pochhammer: requires a > 0");
  if (n == 0) return 0.0;
  if (n <= 64) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += std::log(a + static_cast<double>(i));
    return sum;
  }
  return ln_gamma(a + static_cast<double>(n)) - ln_gamma(a);
}

double kummer_1f1(double a, double b, double z, const SeriesControl& ctl) {
  ctl.validate();
  if (b <= 0.0 && b == std::floor(b)) {
    throw DomainError("kummer_1f1: b must not be a non-positive integer");
  }
  if (z == 0.0) return 1.0;

  // Term magnitudes live in log space; the sign is carried separately.
  double log_abs_term = 0.0;
  double sign = 1.0;
  double sum = 1.0;
  const double log_abs_z = std::log(std::abs(z));
  for (std::size_t n = 0; n + 1 < ctl.max_terms; ++n) {
    const double dn = static_cast<double>(n);
    const double an = a + dn;
    if (an == 0.0) return sum;  // a is a non-positive integer: polynomial
    const double bn = b + dn;
    log_abs_term += std::log(std::abs(an)) - std::log(std::abs(bn)) + log_abs_z - std::log(dn + 1.0);
    if ((an < 0.0) != (bn < 0.0)) sign = -sign;
    if (z < 0.0) sign = -sign;
    const double term = sign * std::exp(log_abs_term);
    sum += term;
    const double next_ratio = std::abs((an + 1.0) / (bn + 1.0) * z / (dn + 2.0));
    if (std::abs(term) < ctl.rel_tol * std::abs(sum) && next_ratio < 1.0) return sum;
  }
  throw ConvergenceError("kummer_1f1: series did not converge", sum, ctl.max_terms);
}

double log_tricomi_u(double a, double b, double z, const SeriesControl& ctl) {
  ctl.validate();
  if (!(a > 0.0)) throw DomainError("tricomi_u: requires a > 0");
  if (!(z > 0.0)) throw DomainError("tricomi_u: requires z > 0");
  if (std::isnan(b)) throw DomainError("tricomi_u: b is NaN");

  // phi(t) = ln of the integrand; its stationary point solves
  // z t^2 + (z - b + 2) t - (a - 1) = 0.
  const double c1 = a - 1.0;
  const double c2 = b - a - 1.0;
  const auto phi = [&](double t) {
    return -z * t + (c1 == 0.0 ? 0.0 : c1 * std::log(t)) + c2 * std::log1p(t);
  };

  double peak = 0.0;
  if (c1 >= 0.0) {
    const double lin = z - b + 2.0;
    const double disc = lin * lin + 4.0 * z * c1;
    // Stable root of the quadratic.
    peak = lin > 0.0 ? 2.0 * c1 / (lin + std::sqrt(disc)) : (-lin + std::sqrt(disc)) / (2.0 * z);
    if (!(peak > 0.0)) peak = 0.0;
  }
  const double scale_log = peak > 0.0 ? phi(peak) : 0.0;

  double width;
  if (peak > 0.0) {
    const double curvature = c1 / (peak * peak) + c2 / ((1.0 + peak) * (1.0 + peak));
    width = curvature > 0.0 ? 1.0 / std::sqrt(curvature) : peak;
  } else {
    width = 1.0 / (z + std::abs(c2) + 1.0);
  }

  const auto integrand = [&](double t) {
    if (t <= 0.0 || !std::isfinite(t)) return 0.0;
    return std::exp(phi(t) - scale_log);
  };

  const double tol = ctl.rel_tol;
  double total = 0.0;
  // t^(a-1) is singular (or has a singular derivative) at 0 unless a is a
  // positive integer, so the head segment goes to the endpoint-robust rule.
  const bool smooth_head = c1 >= 0.0 && c1 == std::floor(c1);
  const double start = peak > 0.0 ? peak : (smooth_head ? 0.0 : width);
  if (start > 0.0) {
    total += smooth_head ? detail::integrate(integrand, 0.0, start, tol)
                         : detail::integrate_endpoint_singular(integrand, 0.0, start, tol);
  }
  total += detail::integrate(
      [&](double u) {
        if (u >= 1.0) return 0.0;
        const double om = 1.0 - u;
        return integrand(start + width * u / om) * width / (om * om);
      },
      0.0, 1.0, tol);
  if (!(total > 0.0)) throw ConvergenceError("tricomi_u: integral underflowed", total, 0);
  return scale_log + std::log(total) - ln_gamma(a);
}

double tricomi_u(double a, double b, double z, const SeriesControl& ctl) {
  return std::exp(log_tricomi_u(a, b, z, ctl));
}

double exp_scaled_e1(double x) {
  if (!(x > 0.0)) throw DomainError("exp_integral_e1: requires x > 0");
  if (std::isinf(x)) return 0.0;
  if (x <= 1.0) return std::exp(x) * exp_integral_e1(x);

  double b = x + 1.0;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (std::size_t i = 1; i < kMaxGammaIter; ++i) {
    const double an = -static_cast<double>(i) * static_cast<double>(i);
    b += 2.0;
    d = 1.0 / (an * d + b);
    c = b + an / c;
    const double delta = c * d;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) return h;
  }
  throw ConvergenceError("exp_integral_e1: continued fraction did not converge", h,
                         kMaxGammaIter);
}

double exp_integral_e1(double x) {
  if (!(x > 0.0)) throw DomainError("exp_integral_e1: requires x > 0");
  if (x > 1.0) return std::exp(-x) * exp_scaled_e1(x);

  // E1(x) = -gamma - ln x - sum_{n>=1} (-x)^n / (n n!)
  double sum = 0.0;
  double fact_term = 1.0;  // (-x)^n / n!
  for (int n = 1; n < 200; ++n) {
    fact_term *= -x / n;
    const double term = fact_term / n;
    sum += term;
    if (std::abs(term) < kEps * std::abs(sum)) break;
  }
  return -std::numbers::egamma - std::log(x) - sum;
}

}  // namespace covert::specfun
