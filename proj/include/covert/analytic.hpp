#pragma once

// Closed-form detection and link metrics of the joint energy detector model.
//
// The eavesdropper sums |y|^2 over all q slots and L samples. Under H1 the k
// occupied slots share one exponential gain g (block fading over the band),
// so conditional on g the statistic is Gamma(kL, rho g + s0) + Gamma((q-k)L, s0).

#include "covert/params.hpp"
#include "covert/specfun.hpp"

namespace covert::analytic {

enum class MissDetectionMethod { quadrature, series };

/// Q(qL, threshold / sigma0_sq).
double false_alarm_prob(const SystemParams& params);

/// Miss-detection probability for a fixed eavesdropper gain g >= 0.
///
/// Negative-binomial mixture of P(qL + n, threshold / sigma0_sq). Truncated
/// once P(qL + n + 1, .) times a bound on the remaining mixture weight drops
/// below ctl.rel_tol times the running sum.
double miss_detection_conditional(const SystemParams& params, double g,
                                  const specfun::SeriesControl& ctl = {});

/// Miss-detection probability averaged over g ~ Exp(omega_e).
///
/// `quadrature` integrates the conditional form over g in
/// (0, omega_e ln 1e16) and adds the exponential tail bound; it is the
/// reference path. `series` sums the Tricomi-U expansion in log space and
/// throws ConvergenceError if the term budget runs out.
double miss_detection_prob(const SystemParams& params,
                           MissDetectionMethod method = MissDetectionMethod::quadrature,
                           const specfun::SeriesControl& ctl = {});

/// Detection error probability P_FA + P_MD (quadrature path).
double dep(const SystemParams& params, const specfun::SeriesControl& ctl = {});

/// Reliable transmission probability exp(-gamma_u k s0 / (m p_b omega_u)).
double rtp(const SystemParams& params);

/// Ergodic rate E_h[log2(1 + m p h / (k s0))] in bits per channel use,
/// closed form e^c E1(c) / ln 2 with c = k s0 / (m omega_u p).
double covert_rate(const SystemParams& params, double power);

}  // namespace covert::analytic
