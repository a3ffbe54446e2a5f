#pragma once

// Stochastic oracles for the closed forms in analytic.hpp.
//
// Trials are split into fixed-size blocks; block b always draws from
// substream b of the caller's RngSpec, so estimates do not depend on how many
// worker threads run the blocks.

#include <cstdint>
#include <vector>

#include "covert/params.hpp"
#include "covert/rng.hpp"

namespace covert::montecarlo {

struct EstimateWithError {
  double mean = 0.0;
  double std_error = 0.0;  ///< sample standard deviation / sqrt(trials)
  std::uint64_t trials = 0;
};

struct DetectorEstimate {
  EstimateWithError p_fa;
  EstimateWithError p_md;

  /// P_FA + P_MD; the two hypotheses use independent draws, so the standard
  /// errors add in quadrature.
  EstimateWithError dep() const;
};

/// Number of worker threads; 0 picks std::thread::hardware_concurrency().
struct ExecutionOptions {
  unsigned threads = 0;
};

inline constexpr std::uint64_t kMinTrials = 100;
inline constexpr std::uint64_t kBlockTrials = 4096;

/// Simulates the joint energy detector under both hypotheses.
///
/// H0: qL noise samples CN(0, s0). H1: one gain g ~ Exp(omega_e) per trial,
/// shared by the k occupied slots; each of the kL occupied samples is
/// sqrt(rho) h x + n with x ~ CN(0, 1), |h|^2 = g; the other (q-k)L samples
/// are noise only. Throws PreconditionError when trials < 100.
DetectorEstimate simulate_detector(const SystemParams& params, std::uint64_t trials,
                                   const RngSpec& rng, ExecutionOptions exec = {});

/// Miss-detection rate with the eavesdropper gain held at `g`.
EstimateWithError simulate_miss_detection_fixed_gain(const SystemParams& params, double g,
                                                     std::uint64_t trials, const RngSpec& rng,
                                                     ExecutionOptions exec = {});

/// Normalized H0 statistic T_e / s0 for each of `trials` trials.
std::vector<double> sample_h0_statistic(const SystemParams& params, std::uint64_t trials,
                                        const RngSpec& rng);

/// Fraction of trials with m p_b h / (k s0) >= gamma_u, h ~ Exp(omega_u).
EstimateWithError simulate_rtp(const SystemParams& params, std::uint64_t trials,
                               const RngSpec& rng, ExecutionOptions exec = {});

/// Sample mean of log2(1 + m p h / (k s0)), h ~ Exp(omega_u).
EstimateWithError simulate_rate(const SystemParams& params, double power, std::uint64_t trials,
                                const RngSpec& rng, ExecutionOptions exec = {});

/// Standard error used when comparing a probability estimate with an exact
/// value p0: the sample SE, or sqrt(p0 (1 - p0) / n) when every trial gave
/// the same outcome and the sample SE is zero.
double comparison_std_error(double p0, const EstimateWithError& estimate);

/// Combined comparison SE for DEP = P_FA + P_MD against exact (fa0, md0).
double dep_comparison_std_error(double fa0, double md0, const DetectorEstimate& estimate);

/// |reference - estimate.mean| <= sigmas * comparison_std_error(...).
bool within_std_errors(double reference, const EstimateWithError& estimate, double sigmas = 3.0);

}  // namespace covert::montecarlo
