#include "covert/params.hpp"

#include <cmath>
#include <string>

#include "covert/errors.hpp"

namespace covert {

std::string_view to_string(ThresholdMode mode) {
  switch (mode) {
    case ThresholdMode::raw:
      return "raw";
    case ThresholdMode::per_sample_normalized:
      return "per_sample_normalized";
  }
  return "unknown";
}

ThresholdMode threshold_mode_from_string(std::string_view text) {
  if (text == "raw") return ThresholdMode::raw;
  if (text == "per_sample_normalized") return ThresholdMode::per_sample_normalized;
  throw DomainError("unknown threshold_mode '" + std::string(text) + "'");
}

void SystemParams::validate() const {
  if (m < 1) throw DomainError("SystemParams: m must be >= 1");
  if (q < 1) throw DomainError("SystemParams: q must be >= 1");
  if (k < 1 || k > q) throw DomainError("SystemParams: require 1 <= k <= q");
  if (L < 1) throw DomainError("SystemParams: L must be >= 1");
  const auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
  if (!positive(p_b)) throw DomainError("SystemParams: p_b must be > 0");
  if (!positive(sigma0_sq)) throw DomainError("SystemParams: sigma0_sq must be > 0");
  if (!positive(omega_e)) throw DomainError("SystemParams: omega_e must be > 0");
  if (!positive(omega_u)) throw DomainError("SystemParams: omega_u must be > 0");
  if (!(gamma_e >= 0.0)) throw DomainError("SystemParams: gamma_e must be >= 0");
  if (!(gamma_u >= 0.0) || std::isinf(gamma_u)) {
    throw DomainError("SystemParams: gamma_u must be finite and >= 0");
  }
  if (!(eps_e > 0.0 && eps_e <= 1.0)) throw DomainError("SystemParams: eps_e must be in (0, 1]");
  if (!(eps_u > 0.0 && eps_u < 1.0)) throw DomainError("SystemParams: eps_u must be in (0, 1)");
}

double SystemParams::effective_threshold() const {
  if (threshold_mode == ThresholdMode::raw) return gamma_e;
  return gamma_e * static_cast<double>(q) * L * sigma0_sq;
}

double power_from_snr_db(double snr_db, double sigma0_sq) {
  return sigma0_sq * std::pow(10.0, snr_db / 10.0);
}

double snr_db_from_power(double power, double sigma0_sq) {
  return 10.0 * std::log10(power / sigma0_sq);
}

}  // namespace covert
