#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>

namespace covert {

/// Identifies a reproducible random stream: same (seed, stream) gives the
/// same draws on every platform.
struct RngSpec {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Counter-based generator: draw i is mix64(key + i * golden). Any substream
/// is addressed by deriving a new key, so trial blocks can be evaluated in
/// any order or on any worker and still produce the same numbers.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(const RngSpec& spec)
      : key_(mix64(spec.seed ^ mix64(spec.stream + 0x632BE59BD9B4E019ULL))) {}

  /// Independent child stream tagged by `tag` (e.g. a trial-block index).
  CounterRng substream(std::uint64_t tag) const {
    CounterRng child = *this;
    child.key_ = mix64(key_ ^ mix64(tag + 0xD1B54A32D192ED03ULL));
    child.counter_ = 0;
    return child;
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return mix64(key_ + (++counter_) * 0x9E3779B97F4A7C15ULL); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1].
  double uniform_open0() { return 1.0 - uniform(); }

  bool bernoulli(double p) { return uniform() < p; }

  /// Exponential with the given mean.
  double exponential(double mean) { return -mean * std::log(uniform_open0()); }

  /// Circularly-symmetric complex Gaussian with E|z|^2 = variance (Box-Muller).
  std::complex<double> complex_normal(double variance) {
    const double radius = std::sqrt(-variance * std::log(uniform_open0()));
    const double angle = 2.0 * std::numbers::pi * uniform();
    return std::polar(radius, angle);
  }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    // Lemire's nearly-divisionless method.
    unsigned __int128 product = static_cast<unsigned __int128>((*this)()) * n;
    auto low = static_cast<std::uint64_t>(product);
    if (low < n) {
      const std::uint64_t threshold = (0 - n) % n;
      while (low < threshold) {
        product = static_cast<unsigned __int128>((*this)()) * n;
        low = static_cast<std::uint64_t>(product);
      }
    }
    return static_cast<std::uint64_t>(product >> 64);
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace covert
