#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>
#include <vector>

#include "covert/analytic.hpp"
#include "covert/cli.hpp"
#include "covert/montecarlo.hpp"
#include "covert/specfun.hpp"
#include "table.hpp"

namespace covert::cli {

namespace {

using nlohmann::ordered_json;

class Report {
 public:
  // Records a check that passes when error <= tolerance.
  void add(const std::string& group, const std::string& name, double error, double tolerance,
           int points = 1) {
    const bool passed = std::isfinite(error) && error <= tolerance;
    ordered_json check;
    check["group"] = group;
    check["name"] = name;
    check["passed"] = passed;
    check["points"] = points;
    check["error"] = to_json(error);
    check["tolerance"] = to_json(tolerance);
    check["margin"] = to_json(tolerance - error);
    checks_.push_back(std::move(check));
    (passed ? passed_ : failed_)++;
  }

  void add_failure(const std::string& group, const std::string& name, const std::string& what) {
    ordered_json check;
    check["group"] = group;
    check["name"] = name;
    check["passed"] = false;
    check["exception"] = what;
    checks_.push_back(std::move(check));
    ++failed_;
  }

  // Runs `body` and records its exceptions as failures.
  template <class Body>
  void guard(const std::string& group, const std::string& name, Body body) {
    try {
      body();
    } catch (const std::exception& e) {
      add_failure(group, name, e.what());
    }
  }

  int failed() const { return failed_; }

  ordered_json json(const RunConfig& config) const {
    ordered_json report;
    report["seed"] = config.seed;
    report["trials"] = config.trials;
    report["rel_tol"] = config.series.rel_tol;
    report["passed"] = passed_;
    report["failed"] = failed_;
    report["ok"] = failed_ == 0;
    report["checks"] = checks_;
    return report;
  }

 private:
  std::vector<ordered_json> checks_;
  int passed_ = 0;
  int failed_ = 0;
};

double rel_error(double value, double reference) {
  return std::abs(value - reference) / std::abs(reference);
}

void identity_checks(const RunConfig& config, Report& report) {
  const auto& ctl = config.series;
  const std::string group = "special_functions";

  report.guard(group, "incomplete_gamma_complement", [&] {
    double worst = 0.0;
    int points = 0;
    for (double s : {0.5, 1.0, 2.5, 8.0, 30.0, 128.0, 512.0}) {
      for (double x : {0.01, 0.5, 2.0, 10.0, 100.0, 512.0, 1024.0}) {
        worst = std::max(worst, std::abs(specfun::reg_gamma_lower(s, x) +
                                         specfun::reg_gamma_upper(s, x) - 1.0));
        ++points;
      }
    }
    report.add(group, "incomplete_gamma_complement", worst, 1e-12, points);
  });

  report.guard(group, "kummer_1f1_exponential", [&] {
    double worst = 0.0;
    int points = 0;
    for (double a : {0.5, 1.0, 3.0, 10.0, 40.0}) {
      for (double z : {0.0, 1.0, 7.5, 25.0, 50.0}) {
        worst = std::max(worst, rel_error(specfun::kummer_1f1(a, a, z, ctl), std::exp(z)));
        ++points;
      }
    }
    report.add(group, "kummer_1f1_exponential", worst, 1e-10, points);
  });

  report.guard(group, "tricomi_u_power", [&] {
    double worst = 0.0;
    int points = 0;
    for (double a : {0.5, 1.0, 2.0, 5.0, 12.0}) {
      for (double z : {0.1, 0.5, 2.0, 10.0, 60.0}) {
        worst = std::max(worst, rel_error(specfun::tricomi_u(a, a + 1.0, z, ctl), std::pow(z, -a)));
        ++points;
      }
    }
    report.add(group, "tricomi_u_power", worst, 1e-9, points);
  });

  report.guard(group, "tricomi_u_kummer_transformation", [&] {
    double worst = 0.0;
    int points = 0;
    for (double a : {0.5, 1.5, 4.0, 9.0, 20.0}) {
      for (double b : {-6.5, -1.0, 0.5, 1.25}) {
        for (double z : {0.3, 4.0}) {
          const double lhs = specfun::log_tricomi_u(a, b, z, ctl);
          const double rhs = (1.0 - b) * std::log(z) + specfun::log_tricomi_u(a - b + 1.0, 2.0 - b, z, ctl);
          worst = std::max(worst, std::abs(std::expm1(lhs - rhs)));
          ++points;
        }
      }
    }
    report.add(group, "tricomi_u_kummer_transformation", worst, 1e-8, points);
  });
}

void analytic_checks(const RunConfig& config, Report& report) {
  const auto exec = montecarlo::ExecutionOptions{config.threads};
  if (config.trials == 0) return;
  std::uint64_t stream = 0;

  for (int k : {4, 8}) {
    for (double snr : {35.0, 40.0, 45.0}) {
      const auto params =
          config.system.with_users(k).with_power(power_from_snr_db(snr, config.system.sigma0_sq));
      const std::string tag = "k" + std::to_string(k) + "_snr" + std::to_string(static_cast<int>(snr));
      const RngSpec rng{config.seed, stream++};
      report.guard("detector_vs_monte_carlo", tag, [&] {
        const double fa = analytic::false_alarm_prob(params);
        const double md = analytic::miss_detection_prob(params, analytic::MissDetectionMethod::quadrature,
                                                        config.series);
        const auto est = montecarlo::simulate_detector(params, config.trials, rng, exec);
        report.add("detector_vs_monte_carlo", tag + "_p_fa", std::abs(fa - est.p_fa.mean),
                   3.0 * montecarlo::comparison_std_error(fa, est.p_fa));
        report.add("detector_vs_monte_carlo", tag + "_p_md", std::abs(md - est.p_md.mean),
                   3.0 * montecarlo::comparison_std_error(md, est.p_md));
        report.add("detector_vs_monte_carlo", tag + "_dep", std::abs(fa + md - est.dep().mean),
                   3.0 * montecarlo::dep_comparison_std_error(fa, md, est));
      });
      report.guard("series_vs_quadrature", tag, [&] {
        const double quad = analytic::miss_detection_prob(params, analytic::MissDetectionMethod::quadrature,
                                                          config.series);
        const double series = analytic::miss_detection_prob(params, analytic::MissDetectionMethod::series,
                                                            config.series);
        report.add("series_vs_quadrature", tag, rel_error(series, quad), 1e-6);
      });
    }
  }

  for (double power : {1.0, 5.0, 25.0}) {
    const auto params = config.system.with_power(power);
    const std::string tag = "p" + std::to_string(static_cast<int>(power));
    const RngSpec rng{config.seed, stream++};
    report.guard("link_vs_monte_carlo", tag, [&] {
      const double rtp = analytic::rtp(params);
      const auto est = montecarlo::simulate_rtp(params, config.trials, rng, exec);
      report.add("link_vs_monte_carlo", tag + "_rtp", std::abs(rtp - est.mean),
                 3.0 * montecarlo::comparison_std_error(rtp, est));
      const double rate = analytic::covert_rate(params, power);
      const auto rate_est = montecarlo::simulate_rate(params, power, config.trials, rng, exec);
      report.add("link_vs_monte_carlo", tag + "_rate", std::abs(rate - rate_est.mean),
                 3.0 * rate_est.std_error);
    });
  }
}

}  // namespace

int cmd_validate(const RunConfig& config, std::ostream& out) {
  Report report;
  identity_checks(config, report);
  analytic_checks(config, report);
  out << report.json(config).dump(2) << '\n';
  return report.failed() == 0 ? kExitOk : kExitValidationFailed;
}

}  // namespace covert::cli
