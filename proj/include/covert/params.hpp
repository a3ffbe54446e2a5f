#pragma once

#include <string>
#include <string_view>

namespace covert {

/// How gamma_e is turned into the threshold applied to the joint statistic.
enum class ThresholdMode {
  raw,                    ///< threshold = gamma_e
  per_sample_normalized,  ///< threshold = gamma_e * q * L * sigma0_sq
};

std::string_view to_string(ThresholdMode mode);
ThresholdMode threshold_mode_from_string(std::string_view text);

/// Scalar parameters of the multi-cell downlink covertness model.
///
/// Defaults are the reference scenario: 4 base stations, 64 frequency slots,
/// 8-sample blocks, gamma_e = gamma_u = 2, omega_u = 2, omega_e = 1.
struct SystemParams {
  int m = 4;                 ///< base stations
  int k = 4;                 ///< active legitimate users
  int q = 64;                ///< frequency slots
  int L = 8;                 ///< samples per data block
  double p_b = 1.0;          ///< BS transmit power (W)
  double sigma0_sq = 1.0;    ///< noise power (W)
  double omega_e = 1.0;      ///< mean eavesdropper channel power gain
  double omega_u = 2.0;      ///< mean legitimate channel power gain
  double gamma_e = 2.0;      ///< eavesdropper threshold, see threshold_mode
  double gamma_u = 2.0;      ///< legitimate SINR decoding threshold
  double eps_e = 0.1;        ///< covertness slack, DEP >= 1 - eps_e
  double eps_u = 0.1;        ///< reliability slack, RTP >= 1 - eps_u
  ThresholdMode threshold_mode = ThresholdMode::per_sample_normalized;

  /// Throws DomainError on any violated invariant.
  void validate() const;

  /// Per-sample signal power scale m p_b / (q k L).
  double rho() const { return m * p_b / (static_cast<double>(q) * k * L); }

  /// Threshold compared against the joint energy statistic.
  double effective_threshold() const;

  SystemParams with_power(double power) const {
    SystemParams copy = *this;
    copy.p_b = power;
    return copy;
  }

  SystemParams with_users(int users) const {
    SystemParams copy = *this;
    copy.k = users;
    return copy;
  }
};

/// p_b = sigma0_sq * 10^(snr_db / 10).
double power_from_snr_db(double snr_db, double sigma0_sq);
double snr_db_from_power(double power, double sigma0_sq);

}  // namespace covert
