#include "covert/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "covert/errors.hpp"
#include "quadrature.hpp"

namespace covert::analytic {

namespace {

// Lazily extended table of P(shape0 + n, x), n = 0, 1, ...
class LowerGammaTable {
 public:
  LowerGammaTable(double shape0, double x) : shape0_(shape0), x_(x) {}

  double at(std::size_t n) {
    while (values_.size() <= n) {
      values_.push_back(
          specfun::reg_gamma_lower(shape0_ + static_cast<double>(values_.size()), x_));
    }
    return values_[n];
  }

 private:
  double shape0_;
  double x_;
  std::vector<double> values_;
};

// Conditional miss-detection evaluator sharing one P table across many g.
class ConditionalMissDetection {
 public:
  ConditionalMissDetection(const SystemParams& params, const specfun::SeriesControl& ctl)
      : ctl_(ctl),
        shape_signal_(static_cast<double>(params.k) * params.L),
        rho_over_noise_(params.rho() / params.sigma0_sq),
        threshold_(params.effective_threshold() / params.sigma0_sq),
        table_(static_cast<double>(params.q) * params.L, threshold_) {}

  double threshold() const { return threshold_; }

  double operator()(double g) {
    if (std::isinf(threshold_)) return 1.0;
    if (threshold_ == 0.0) return 0.0;
    const double snr = rho_over_noise_ * g;
    if (snr == 0.0) return table_.at(0);

    // Weights w_n = (kL)_n / n! x^n (1 - x)^{kL}, x = snr / (1 + snr).
    const double log_x = std::log(snr) - std::log1p(snr);
    double log_w = -shape_signal_ * std::log1p(snr);
    double sum = 0.0;
    double mass = 0.0;
    for (std::size_t n = 0; n < ctl_.max_terms; ++n) {
      const double dn = static_cast<double>(n);
      const double w = std::exp(log_w);
      sum += w * table_.at(n);
      mass += w;

      const double log_w_next = log_w + std::log(shape_signal_ + dn) - std::log(dn + 1.0) + log_x;
      double rest = std::max(1.0 - mass, 0.0);
      // w_{j+1}/w_j is nonincreasing in j, so a ratio below one bounds the
      // remaining weight geometrically.
      const double ratio = (shape_signal_ + dn + 1.0) / (dn + 2.0) * std::exp(log_x);
      if (ratio < 1.0) rest = std::min(rest, std::exp(log_w_next) / (1.0 - ratio));
      if (table_.at(n + 1) * rest <= ctl_.rel_tol * sum) return sum;
      log_w = log_w_next;
    }
    throw ConvergenceError("miss_detection_conditional: series did not converge", sum,
                           ctl_.max_terms);
  }

  LowerGammaTable& table() { return table_; }

 private:
  specfun::SeriesControl ctl_;
  double shape_signal_;
  double rho_over_noise_;
  double threshold_;
  LowerGammaTable table_;
};

double miss_detection_quadrature(const SystemParams& params, const specfun::SeriesControl& ctl) {
  ConditionalMissDetection conditional(params, ctl);
  if (std::isinf(conditional.threshold())) return 1.0;
  if (conditional.threshold() == 0.0) return 0.0;

  const double omega = params.omega_e;
  const double g_max = omega * std::log(1e16);
  const auto integrand = [&](double g) { return conditional(g) * std::exp(-g / omega) / omega; };

  // The conditional series is itself truncated at ctl.rel_tol, so the outer
  // integral cannot resolve below a few hundred times that.
  const double tol = std::max(ctl.rel_tol, 1e-10);
  // Break the range where P_MD(g) drops: the gain at which the H1 mean
  // statistic reaches the threshold, plus a few multiples of omega.
  std::vector<double> breaks{0.0, 0.5 * omega, 2.0 * omega, 8.0 * omega, g_max};
  const double excess = params.effective_threshold() -
                        static_cast<double>(params.q) * params.L * params.sigma0_sq;
  if (excess > 0.0) {
    const double g_cross = excess / (params.rho() * params.k * params.L);
    for (double f : {0.25, 0.5, 0.8, 1.0, 1.25, 2.0, 4.0}) breaks.push_back(f * g_cross);
  }
  std::erase_if(breaks, [&](double b) { return !(b >= 0.0 && b <= g_max); });
  std::sort(breaks.begin(), breaks.end());
  // Near-coincident breaks would leave slivers the adaptive rule keeps splitting.
  breaks.erase(std::unique(breaks.begin(), breaks.end(),
                           [](double a, double b) { return b - a <= 1e-6 * b; }),
               breaks.end());
  breaks.back() = g_max;

  double total = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    // Segments far from the drop carry almost no mass; their rounding noise
    // is judged against the whole integral.
    total += detail::integrate(integrand, breaks[i], breaks[i + 1], tol, 1e-9);
  }
  // P_MD(g) is nonincreasing in g, so P_MD(g_max) e^{-g_max/omega} bounds the tail.
  return total + conditional(g_max) * std::exp(-g_max / omega);
}

double miss_detection_series(const SystemParams& params, const specfun::SeriesControl& ctl) {
  const double shape_signal = static_cast<double>(params.k) * params.L;
  const double threshold = params.effective_threshold() / params.sigma0_sq;
  if (std::isinf(threshold)) return 1.0;
  if (threshold == 0.0) return 0.0;

  LowerGammaTable table(static_cast<double>(params.q) * params.L, threshold);
  const double c = params.sigma0_sq / (params.rho() * params.omega_e);
  const double log_c = std::log(c);
  const double b = 2.0 - shape_signal;

  double log_poch = 0.0;  // ln (kL)_n
  double sum = 0.0;
  double mass = 0.0;
  for (std::size_t n = 0; n < ctl.max_terms; ++n) {
    const double dn = static_cast<double>(n);
    const double w = std::exp(log_c + log_poch + specfun::log_tricomi_u(dn + 1.0, b, c, ctl));
    sum += w * table.at(n);
    mass += w;
    if (table.at(n + 1) * std::max(1.0 - mass, 0.0) <= ctl.rel_tol * sum) return sum;
    log_poch += std::log(shape_signal + dn);
  }
  throw ConvergenceError("miss_detection_prob: Tricomi series did not converge", sum,
                         ctl.max_terms);
}

}  // namespace

double false_alarm_prob(const SystemParams& params) {
  params.validate();
  return specfun::reg_gamma_upper(static_cast<double>(params.q) * params.L,
                                  params.effective_threshold() / params.sigma0_sq);
}

double miss_detection_conditional(const SystemParams& params, double g,
                                  const specfun::SeriesControl& ctl) {
  params.validate();
  ctl.validate();
  if (!(g >= 0.0) || std::isinf(g)) throw DomainError("miss_detection_conditional: g must be finite and >= 0");
  ConditionalMissDetection conditional(params, ctl);
  return conditional(g);
}

double miss_detection_prob(const SystemParams& params, MissDetectionMethod method,
                           const specfun::SeriesControl& ctl) {
  params.validate();
  ctl.validate();
  if (method == MissDetectionMethod::series) return miss_detection_series(params, ctl);
  return miss_detection_quadrature(params, ctl);
}

double dep(const SystemParams& params, const specfun::SeriesControl& ctl) {
  return false_alarm_prob(params) +
         miss_detection_prob(params, MissDetectionMethod::quadrature, ctl);
}

double rtp(const SystemParams& params) {
  params.validate();
  return std::exp(-params.gamma_u * params.k * params.sigma0_sq /
                  (params.m * params.p_b * params.omega_u));
}

double covert_rate(const SystemParams& params, double power) {
  if (!(power > 0.0) || std::isinf(power)) throw DomainError("covert_rate: power must be finite and > 0");
  params.with_power(power).validate();
  const double c = params.k * params.sigma0_sq / (params.m * params.omega_u * power);
  return specfun::exp_scaled_e1(c) / std::numbers::ln2;
}

}  // namespace covert::analytic
