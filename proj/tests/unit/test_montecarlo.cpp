#include "doctest.h"

#include <boost/math/special_functions/gamma.hpp>

#include <cmath>

#include "covert/analytic.hpp"
#include "covert/errors.hpp"
#include "covert/montecarlo.hpp"
#include "oracles.hpp"

using namespace covert;
using namespace covert::montecarlo;

namespace {

SystemParams small_instance(double power = 4.0) {
  SystemParams p;
  p.q = 4;
  p.k = 2;
  p.L = 2;
  p.m = 2;
  p.p_b = power;
  p.gamma_e = 8.0;
  p.threshold_mode = ThresholdMode::raw;
  return p;
}

}  // namespace

TEST_CASE("counter RNG is reproducible and substreams differ") {
  CounterRng a({42, 7});
  CounterRng b({42, 7});
  for (int i = 0; i < 100; ++i) CHECK(a() == b());
  CounterRng base({42, 7});
  CHECK(base.substream(1)() != base.substream(2)());
  CHECK(CounterRng({42, 7})() != CounterRng({42, 8})());
  CounterRng c({1, 0});
  for (int i = 0; i < 1000; ++i) {
    const double u = c.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(c.below(7) < 7);
  }
}

TEST_CASE("too few trials is a precondition error") {
  CHECK_THROWS_AS(simulate_detector(small_instance(), 99, {}), PreconditionError);
  CHECK_THROWS_AS(simulate_rtp(small_instance(), 10, {}), PreconditionError);
  CHECK_THROWS_AS(simulate_rate(small_instance(), 1.0, 0, {}), PreconditionError);
  CHECK_NOTHROW(simulate_detector(small_instance(), 100, {}));
}

TEST_CASE("estimates do not depend on the thread count") {
  const auto p = small_instance();
  const auto one = simulate_detector(p, 20'000, {9, 1}, {1});
  const auto three = simulate_detector(p, 20'000, {9, 1}, {3});
  CHECK(one.p_fa.mean == three.p_fa.mean);
  CHECK(one.p_md.mean == three.p_md.mean);
  const auto rate_one = simulate_rate(p, 2.0, 20'000, {9, 2}, {1});
  const auto rate_four = simulate_rate(p, 2.0, 20'000, {9, 2}, {4});
  CHECK(rate_one.mean == rate_four.mean);
  CHECK(rate_one.std_error == rate_four.std_error);
}

TEST_CASE("detector simulation agrees with the closed forms within 3 SE") {
  for (double power : {1.0, 4.0, 20.0}) {
    const auto p = small_instance(power);
    const auto est = simulate_detector(p, 50'000, {3, static_cast<std::uint64_t>(power)});
    CAPTURE(power);
    CHECK(within_std_errors(analytic::false_alarm_prob(p), est.p_fa));
    CHECK(within_std_errors(analytic::miss_detection_prob(p), est.p_md));
  }
}

TEST_CASE("fixed-gain miss detection agrees with the conditional form") {
  const auto p = small_instance();
  for (double g : {0.0, 0.5, 3.0}) {
    const auto est = simulate_miss_detection_fixed_gain(p, g, 40'000, {5, 0});
    CAPTURE(g);
    CHECK(within_std_errors(analytic::miss_detection_conditional(p, g), est));
  }
  CHECK_THROWS_AS(simulate_miss_detection_fixed_gain(p, -1.0, 1000, {}), DomainError);
}

TEST_CASE("H0 statistic is Gamma(qL, 1) distributed (KS at the 1% level)") {
  const auto p = small_instance();
  const std::size_t n = 5000;
  const auto samples = sample_h0_statistic(p, n, {11, 0});
  REQUIRE(samples.size() == n);
  const double d = oracle::ks_statistic(samples, [](double x) { return boost::math::gamma_p(8.0, x); });
  CHECK(d < 1.628 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("link simulations agree with RTP and rate closed forms") {
  SystemParams p;
  for (double power : {0.5, 5.0, 50.0}) {
    const auto at = p.with_power(power);
    CHECK(within_std_errors(analytic::rtp(at), simulate_rtp(at, 100'000, {2, 0})));
    CHECK(within_std_errors(analytic::covert_rate(at, power), simulate_rate(at, power, 100'000, {2, 1})));
  }
}

TEST_CASE("zero sample SE falls back to the binomial SE at the reference") {
  const EstimateWithError all_zero{0.0, 0.0, 10'000};
  CHECK(comparison_std_error(1e-5, all_zero) == doctest::Approx(std::sqrt(1e-5 * (1 - 1e-5) / 1e4)));
  CHECK(within_std_errors(1e-5, all_zero));
  CHECK_FALSE(within_std_errors(0.01, all_zero));
  const EstimateWithError noisy{0.5, 0.01, 100};
  CHECK(comparison_std_error(0.3, noisy) == 0.01);
  CHECK(within_std_errors(0.52, noisy));
  CHECK_FALSE(within_std_errors(0.54, noisy));
}

TEST_CASE("DEP estimate combines the two hypotheses") {
  const DetectorEstimate est{{0.1, 0.003, 1000}, {0.2, 0.004, 1000}};
  CHECK(est.dep().mean == doctest::Approx(0.3));
  CHECK(est.dep().std_error == doctest::Approx(0.005));
}
