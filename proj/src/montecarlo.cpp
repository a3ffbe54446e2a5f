#include "covert/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <string>
#include <thread>
#include <vector>

#include "covert/errors.hpp"

namespace covert::montecarlo {

namespace {

// Substream tags; keep distinct so the hypotheses never share draws.
constexpr std::uint64_t kTagNull = 0x48300000;
constexpr std::uint64_t kTagAlt = 0x48310000;
constexpr std::uint64_t kTagFixedGain = 0x46470000;
constexpr std::uint64_t kTagLink = 0x4C4B0000;
constexpr std::uint64_t kTagRate = 0x52540000;

// Running mean / second central moment, mergeable in a fixed order.
struct Moments {
  std::uint64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++n;
    const double delta = x - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (x - mean);
  }

  void merge(const Moments& other) {
    if (other.n == 0) return;
    const auto total = static_cast<double>(n + other.n);
    const double delta = other.mean - mean;
    mean += delta * static_cast<double>(other.n) / total;
    m2 += other.m2 + delta * delta * static_cast<double>(n) * static_cast<double>(other.n) / total;
    n += other.n;
  }

  EstimateWithError estimate() const {
    const double variance = n > 1 ? m2 / static_cast<double>(n - 1) : 0.0;
    return {mean, std::sqrt(variance / static_cast<double>(n)), n};
  }
};

EstimateWithError bernoulli_estimate(std::uint64_t hits, std::uint64_t trials) {
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(hits) / n;
  const double variance = trials > 1 ? p * (1.0 - p) * n / (n - 1.0) : 0.0;
  return {p, std::sqrt(variance / n), trials};
}

void require_trials(std::uint64_t trials) {
  if (trials < kMinTrials) {
    throw PreconditionError("Monte Carlo needs at least 100 trials, got " + std::to_string(trials));
  }
}

// Runs `block(index, count)` for every block and returns the results in
// block order. Each block derives its own substream, so the worker count
// only affects wall time.
template <class Result>
std::vector<Result> run_blocks(std::uint64_t trials, ExecutionOptions exec,
                               const std::function<Result(std::uint64_t, std::uint64_t)>& block) {
  const std::uint64_t blocks = (trials + kBlockTrials - 1) / kBlockTrials;
  std::vector<Result> results(blocks);
  const auto count_of = [&](std::uint64_t b) {
    return std::min(kBlockTrials, trials - b * kBlockTrials);
  };

  unsigned threads = exec.threads == 0 ? std::thread::hardware_concurrency() : exec.threads;
  threads = static_cast<unsigned>(std::clamp<std::uint64_t>(threads, 1, blocks));
  if (threads == 1) {
    for (std::uint64_t b = 0; b < blocks; ++b) results[b] = block(b, count_of(b));
    return results;
  }

  std::atomic<std::uint64_t> next{0};
  {
    std::vector<std::jthread> workers;
    workers.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) {
      workers.emplace_back([&] {
        for (std::uint64_t b = next++; b < blocks; b = next++) results[b] = block(b, count_of(b));
      });
    }
  }
  return results;
}

std::uint64_t sum_counts(const std::vector<std::uint64_t>& counts) {
  std::uint64_t total = 0;
  for (auto c : counts) total += c;
  return total;
}

// Sum of `samples` squared magnitudes of CN(0, variance) noise. Only |n|^2
// enters the statistic and for a Box-Muller draw that is exactly
// -variance * ln(u), so the phase is not generated.
double noise_energy(CounterRng& rng, int samples, double variance) {
  double energy = 0.0;
  for (int i = 0; i < samples; ++i) energy += rng.exponential(variance);
  return energy;
}

// One H1 trial with eavesdropper gain `g`.
double alternative_statistic(CounterRng& rng, const SystemParams& params, double g) {
  const double amplitude = std::sqrt(params.rho());
  const std::complex<double> h = std::polar(std::sqrt(g), 2.0 * std::numbers::pi * rng.uniform());
  const int signal_samples = params.k * params.L;
  double energy = 0.0;
  for (int i = 0; i < signal_samples; ++i) {
    const std::complex<double> x = rng.complex_normal(1.0);
    const std::complex<double> y = amplitude * h * x + rng.complex_normal(params.sigma0_sq);
    energy += std::norm(y);
  }
  return energy + noise_energy(rng, (params.q - params.k) * params.L, params.sigma0_sq);
}

}  // namespace

EstimateWithError DetectorEstimate::dep() const {
  return {p_fa.mean + p_md.mean, std::hypot(p_fa.std_error, p_md.std_error),
          std::min(p_fa.trials, p_md.trials)};
}

DetectorEstimate simulate_detector(const SystemParams& params, std::uint64_t trials,
                                   const RngSpec& rng, ExecutionOptions exec) {
  params.validate();
  require_trials(trials);
  const double threshold = params.effective_threshold();
  const CounterRng base(rng);
  const int all_samples = params.q * params.L;

  const auto false_alarms = run_blocks<std::uint64_t>(
      trials, exec, [&](std::uint64_t b, std::uint64_t count) {
        CounterRng draw = base.substream(kTagNull).substream(b);
        std::uint64_t hits = 0;
        for (std::uint64_t t = 0; t < count; ++t) {
          if (noise_energy(draw, all_samples, params.sigma0_sq) > threshold) ++hits;
        }
        return hits;
      });

  const auto misses = run_blocks<std::uint64_t>(
      trials, exec, [&](std::uint64_t b, std::uint64_t count) {
        CounterRng draw = base.substream(kTagAlt).substream(b);
        std::uint64_t hits = 0;
        for (std::uint64_t t = 0; t < count; ++t) {
          const double g = draw.exponential(params.omega_e);
          if (alternative_statistic(draw, params, g) < threshold) ++hits;
        }
        return hits;
      });

  return {bernoulli_estimate(sum_counts(false_alarms), trials),
          bernoulli_estimate(sum_counts(misses), trials)};
}

EstimateWithError simulate_miss_detection_fixed_gain(const SystemParams& params, double g,
                                                     std::uint64_t trials, const RngSpec& rng,
                                                     ExecutionOptions exec) {
  params.validate();
  require_trials(trials);
  if (!(g >= 0.0)) throw DomainError("simulate_miss_detection_fixed_gain: g must be >= 0");
  const double threshold = params.effective_threshold();
  const CounterRng base(rng);
  const auto misses = run_blocks<std::uint64_t>(
      trials, exec, [&](std::uint64_t b, std::uint64_t count) {
        CounterRng draw = base.substream(kTagFixedGain).substream(b);
        std::uint64_t hits = 0;
        for (std::uint64_t t = 0; t < count; ++t) {
          if (alternative_statistic(draw, params, g) < threshold) ++hits;
        }
        return hits;
      });
  return bernoulli_estimate(sum_counts(misses), trials);
}

std::vector<double> sample_h0_statistic(const SystemParams& params, std::uint64_t trials,
                                        const RngSpec& rng) {
  params.validate();
  require_trials(trials);
  const CounterRng base(rng);
  const int all_samples = params.q * params.L;
  std::vector<double> out;
  out.reserve(trials);
  for (std::uint64_t b = 0; b * kBlockTrials < trials; ++b) {
    CounterRng draw = base.substream(kTagNull).substream(b);
    const std::uint64_t count = std::min(kBlockTrials, trials - b * kBlockTrials);
    for (std::uint64_t t = 0; t < count; ++t) {
      out.push_back(noise_energy(draw, all_samples, params.sigma0_sq) / params.sigma0_sq);
    }
  }
  return out;
}

EstimateWithError simulate_rtp(const SystemParams& params, std::uint64_t trials,
                               const RngSpec& rng, ExecutionOptions exec) {
  params.validate();
  require_trials(trials);
  const double scale = params.m * params.p_b / (params.k * params.sigma0_sq);
  const CounterRng base(rng);
  const auto successes = run_blocks<std::uint64_t>(
      trials, exec, [&](std::uint64_t b, std::uint64_t count) {
        CounterRng draw = base.substream(kTagLink).substream(b);
        std::uint64_t hits = 0;
        for (std::uint64_t t = 0; t < count; ++t) {
          if (scale * draw.exponential(params.omega_u) >= params.gamma_u) ++hits;
        }
        return hits;
      });
  return bernoulli_estimate(sum_counts(successes), trials);
}

EstimateWithError simulate_rate(const SystemParams& params, double power, std::uint64_t trials,
                                const RngSpec& rng, ExecutionOptions exec) {
  if (!(power > 0.0)) throw DomainError("simulate_rate: power must be > 0");
  params.with_power(power).validate();
  require_trials(trials);
  const double scale = params.m * power / (params.k * params.sigma0_sq);
  const CounterRng base(rng);
  const auto blocks = run_blocks<Moments>(
      trials, exec, [&](std::uint64_t b, std::uint64_t count) {
        CounterRng draw = base.substream(kTagRate).substream(b);
        Moments moments;
        for (std::uint64_t t = 0; t < count; ++t) {
          moments.add(std::log2(1.0 + scale * draw.exponential(params.omega_u)));
        }
        return moments;
      });
  Moments total;
  for (const auto& m : blocks) total.merge(m);
  return total.estimate();
}

double comparison_std_error(double p0, const EstimateWithError& estimate) {
  if (estimate.std_error > 0.0) return estimate.std_error;
  if (p0 >= 0.0 && p0 <= 1.0 && estimate.trials > 0) {
    return std::sqrt(p0 * (1.0 - p0) / static_cast<double>(estimate.trials));
  }
  return 0.0;
}

double dep_comparison_std_error(double fa0, double md0, const DetectorEstimate& estimate) {
  return std::hypot(comparison_std_error(fa0, estimate.p_fa),
                    comparison_std_error(md0, estimate.p_md));
}

bool within_std_errors(double reference, const EstimateWithError& estimate, double sigmas) {
  return std::abs(reference - estimate.mean) <=
         sigmas * comparison_std_error(reference, estimate);
}

}  // namespace covert::montecarlo
